use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use citescope::pipeline::{self, AnalysisConfig, AnalyzeRequest};
use citescope::relatedness::{CouplingOptions, EmbeddingSpec};
use citescope::report::{GroupBy, Report};
use citescope::synth::{self, Scenario};
use citescope::validate::validate_files;
use citescope::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_EMPTY_ANALYSIS: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Citation-context analysis of full-text citing papers.
///
/// Set CITESCOPE_LOG (error, warn, info, debug, trace) to control logging.
#[derive(Parser)]
#[command(name = "citescope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus, compute all profiles and write CSV and JSON reports.
    Analyze(AnalyzeArgs),
    /// Check corpus and target files and print findings.
    Validate(ValidateArgs),
    /// Generate a synthetic corpus, targets and ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Citing documents, one JSON object per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Target papers, one JSON object per line.
    #[arg(long)]
    targets: PathBuf,
    /// Valence lexicon (token<TAB>valence); defaults to the bundled one.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Embedding provider: file:PATH, url:URL or test.
    #[arg(long, value_parser = parse_embeddings)]
    embeddings: EmbeddingSpec,
    /// Group rows by citing year or by citation age.
    #[arg(long, value_enum, default_value_t = GroupBy::Year)]
    group_by: GroupBy,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Drop the target's own id from the citing paper's reference set
    /// before computing bibliographic coupling.
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true",
          action = clap::ArgAction::Set)]
    exclude_target_from_coupling: bool,
    /// Suppress groups with fewer (citing paper, target) pairs.
    #[arg(long, default_value_t = 1)]
    min_pairs: u64,
    /// Worker threads [default: available cores].
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    targets: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Scenario file (TOML); defaults to the built-in aging scenario.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn parse_embeddings(s: &str) -> Result<EmbeddingSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn print_summary(report: &Report) {
    let i = &report.ingest;
    let t = &report.stats_targets;
    println!(
        "documents: {} read, {} malformed, {} invalid, {} without full text",
        i.documents_read, i.documents_malformed, i.documents_invalid, i.documents_without_fulltext
    );
    println!("targets: {} loaded, {} skipped", i.targets_loaded, i.targets_skipped);
    println!("markers: {} found, {} unresolved ({:.2}%)", i.markers, i.unresolved_markers, 100.0 * i.unresolved_rate());
    println!(
        "targets scope: {} citing documents, {} references, {} mentions, {} citations, {} sentences",
        t.documents, t.references, t.reference_mentions, t.in_text_citations, t.citation_sentences
    );
    let docs: u64 = report.rows.iter().map(|r| r.coverage.citing_docs).sum();
    let full: u64 = report.rows.iter().map(|r| r.coverage.docs_with_fulltext).sum();
    let pairs: u64 = report.rows.iter().map(|r| r.coverage.n_pairs).sum();
    println!(
        "coverage: {} groups, {pairs} pairs, {full} of {docs} group memberships with full text",
        report.rows.len()
    );
    for note in &report.notes {
        println!("note: {note}");
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let request = AnalyzeRequest {
        corpus: args.corpus,
        targets: args.targets,
        lexicon: args.lexicon,
        embeddings: args.embeddings,
        config: AnalysisConfig {
            group_by: args.group_by,
            min_pairs: args.min_pairs,
            coupling: CouplingOptions { exclude_target: args.exclude_target_from_coupling },
            jobs: args.jobs.map(usize::from),
        },
    };
    let report = pipeline::run(&request)?;
    let files = pipeline::write_outputs(&report, &args.out)?;
    print_summary(&report);
    println!("wrote {} files to {}", files.len(), args.out.display());
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<bool, Error> {
    let report = validate_files(&args.corpus, &args.targets)?;
    for finding in &report.findings {
        println!("{finding}");
    }
    if report.documents == 0 {
        println!("warning: 0 documents in {}", args.corpus.display());
    }
    println!(
        "{} documents, {} targets: {} errors, {} warnings",
        report.documents,
        report.targets,
        report.errors(),
        report.warnings()
    );
    Ok(report.is_clean())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let mut scenario = match &args.scenario {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let corpus = synth::generate(&scenario)?;
    corpus.write_to_dir(&args.out)?;
    println!(
        "wrote {} documents and {} targets to {}",
        corpus.documents.len(),
        corpus.targets.len(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CITESCOPE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => analyze(args).map(|()| true),
        Command::Validate(args) => validate(args),
        Command::Synth(args) => synth(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(err @ Error::EmptyAnalysis) => {
            eprintln!("citescope: {err}");
            ExitCode::from(EXIT_EMPTY_ANALYSIS)
        }
        Err(err) => {
            eprintln!("citescope: {err}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
