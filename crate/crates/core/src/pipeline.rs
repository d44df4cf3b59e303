//! End-to-end analysis: stream the corpus in chunks, parse and measure each
//! document in parallel, then aggregate in corpus order so the output does
//! not depend on the number of worker threads.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{self, BufRead};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::location::{tertile, text_progression, LocationRecord};
use crate::mentions::{citation_usage, reference_usage};
use crate::model::{load_targets, CitingDocument, CorpusReader, ParsedDocument, TargetPaper, TargetSet};
use crate::parser::{CitationParser, Tally};
use crate::relatedness::{
    reference_relatedness, textual_from_vectors, CouplingOptions, EmbedItem, EmbeddingProvider, EmbeddingSpec,
    EmbeddingVector, MissingReason, RelatednessRecord,
};
use crate::report::{
    aggregate, emit_csv, emit_json, AggregateOptions, AnalysisRecords, CoverageRecord, GroupBy, IngestSummary, Report,
    RunMetadata,
};
use crate::sentiment::{bundled_lexicon, prepare_sentence, score, SentimentRecord, ValenceLexicon, DEFAULT_LEXICON};

/// Documents parsed per parallel batch.
pub const CHUNK_SIZE: usize = 2048;

pub const REPORT_FILE: &str = "report.json";

/// Share of unresolved markers above which the report carries a note.
const UNRESOLVED_NOTE_RATE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub group_by: GroupBy,
    pub min_pairs: u64,
    pub coupling: CouplingOptions,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { group_by: GroupBy::Year, min_pairs: 1, coupling: CouplingOptions::default(), jobs: None }
    }
}

/// Records, corpus statistics and counters of one pass over a corpus.
#[derive(Debug, Clone, Default)]
pub struct AnalysisOutput {
    pub records: AnalysisRecords,
    pub tally: Tally,
    pub ingest: IngestSummary,
    pub missing: BTreeMap<MissingReason, u64>,
}

impl AnalysisOutput {
    /// Aggregates into a report with empty metadata.
    pub fn into_report(self, config: &AnalysisConfig) -> Result<Report> {
        let options = AggregateOptions { group_by: config.group_by, min_pairs: config.min_pairs };
        let (rows, mut notes) = aggregate(&self.records, options)?;
        let rate = self.ingest.unresolved_rate();
        if rate > UNRESOLVED_NOTE_RATE {
            notes.insert(0, format!("{:.1}% of in-text markers could not be resolved to a reference", rate * 100.0));
        }
        for (reason, n) in &self.missing {
            notes.push(format!(
                "{n} relatedness values missing: {}",
                serde_json::to_value(reason)?.as_str().unwrap_or("")
            ));
        }
        let mut report = Report::new(rows, notes);
        report.ingest = self.ingest;
        report.stats_all = self.tally.all;
        report.stats_targets = self.tally.targets;
        Ok(report)
    }
}

/// Shared read-only state of one analysis.
pub struct Analyzer<'a> {
    pub targets: &'a TargetSet,
    pub lexicon: &'a ValenceLexicon,
    pub embedder: &'a dyn EmbeddingProvider,
    pub config: AnalysisConfig,
    parser: &'a CitationParser,
    target_vectors: HashMap<&'a str, EmbeddingVector>,
}

impl<'a> Analyzer<'a> {
    pub fn new(
        targets: &'a TargetSet,
        lexicon: &'a ValenceLexicon,
        embedder: &'a dyn EmbeddingProvider,
        config: AnalysisConfig,
    ) -> Result<Self> {
        let texts: Vec<(&str, String)> = targets
            .values()
            .filter(|t| !t.abstract_text.trim().is_empty())
            .map(|t| (t.id.as_str(), t.embedding_text()))
            .collect();
        let items: Vec<EmbedItem> = texts.iter().map(|(id, text)| EmbedItem { id, text }).collect();
        let vectors = if items.is_empty() { Vec::new() } else { embedder.embed(&items)? };
        let target_vectors = texts.iter().zip(vectors).filter_map(|((id, _), v)| v.map(|v| (*id, v))).collect();
        Ok(Analyzer { targets, lexicon, embedder, config, parser: CitationParser::shared(), target_vectors })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = self.config.jobs {
            builder = builder.num_threads(jobs.max(1));
        }
        builder.build().map_err(|e| Error::ThreadPool(e.to_string()))
    }

    /// Runs over in-memory documents.
    pub fn analyze_documents(&self, docs: impl IntoIterator<Item = CitingDocument>) -> Result<AnalysisOutput> {
        self.analyze(docs.into_iter().map(Ok))
    }

    /// Runs over every document of `docs` and returns the combined output.
    /// The first read error aborts the run. Reader counters are not included
    /// in [`IngestSummary`]; see [`run`].
    pub fn analyze(&self, docs: impl IntoIterator<Item = Result<CitingDocument>>) -> Result<AnalysisOutput> {
        let pool = self.pool()?;
        let mut output = AnalysisOutput::default();
        let mut docs = docs.into_iter();
        loop {
            let chunk: Vec<CitingDocument> = docs.by_ref().take(CHUNK_SIZE).collect::<Result<_>>()?;
            if chunk.is_empty() {
                break;
            }
            let parsed: Vec<ParsedDocument> =
                pool.install(|| chunk.into_par_iter().map(|d| self.parser.extract(d)).collect());
            let doc_vectors = self.embed_documents(&parsed)?;
            let results: Vec<DocumentResult> = pool.install(|| {
                parsed.par_iter().zip(doc_vectors.par_iter()).map(|(p, v)| self.measure(p, v.as_ref())).collect()
            });
            for r in results {
                output.tally.merge(&r.tally);
                output.records.extend(r.records);
                output.ingest.documents_read += 1;
                output.ingest.documents_without_fulltext += u64::from(!r.has_fulltext);
                output.ingest.markers += r.markers;
                output.ingest.unresolved_markers += r.unresolved;
                output.ingest.parse_warnings += r.warnings;
                for reason in r.missing {
                    *output.missing.entry(reason).or_default() += 1;
                }
            }
        }
        Ok(output)
    }

    /// Embeds the abstracts of documents that will need a textual value.
    fn embed_documents(&self, parsed: &[ParsedDocument]) -> Result<Vec<Option<EmbeddingVector>>> {
        let wanted: Vec<usize> = (0..parsed.len())
            .filter(|&i| {
                let doc = &parsed[i].doc;
                doc.has_body() && !doc.abstract_text.trim().is_empty() && !self.cited_targets(doc).is_empty()
            })
            .collect();
        let mut out = vec![None; parsed.len()];
        if wanted.is_empty() {
            return Ok(out);
        }
        let texts: Vec<String> = wanted.iter().map(|&i| parsed[i].doc.embedding_text()).collect();
        let items: Vec<EmbedItem> =
            wanted.iter().zip(&texts).map(|(&i, text)| EmbedItem { id: &parsed[i].doc.id, text }).collect();
        for (i, v) in wanted.into_iter().zip(self.embedder.embed(&items)?) {
            out[i] = v;
        }
        Ok(out)
    }

    /// Reference keys naming a target, grouped by target in id order.
    fn cited_targets(&self, doc: &CitingDocument) -> BTreeMap<&'a str, (&'a TargetPaper, Vec<String>)> {
        let mut cited: BTreeMap<&str, (&TargetPaper, Vec<String>)> = BTreeMap::new();
        for r in &doc.references {
            if let Some((id, target)) = r.cited_id.as_deref().and_then(|id| self.targets.get_key_value(id)) {
                cited.entry(id.as_str()).or_insert_with(|| (target, Vec::new())).1.push(r.key.clone());
            }
        }
        cited
    }

    fn measure(&self, parsed: &ParsedDocument, doc_vector: Option<&EmbeddingVector>) -> DocumentResult {
        let doc = &parsed.doc;
        let mut tally = Tally::default();
        tally.add(parsed, self.targets);
        let mut result = DocumentResult {
            records: AnalysisRecords::default(),
            tally,
            has_fulltext: doc.has_body(),
            markers: (parsed.citations.len() + parsed.unresolved.len()) as u64,
            unresolved: parsed.unresolved.len() as u64,
            warnings: parsed.warnings.len() as u64,
            missing: Vec::new(),
        };
        let cited = self.cited_targets(doc);
        if cited.is_empty() {
            return result;
        }
        let records = &mut result.records;
        records.coverage.push(CoverageRecord {
            doc_id: doc.id.clone(),
            citing_year: doc.year,
            targets: cited.values().map(|(t, _)| (t.id.clone(), t.year)).collect(),
            has_fulltext: result.has_fulltext,
        });
        if !result.has_fulltext {
            return result;
        }

        let target_of: HashMap<&str, &TargetPaper> =
            cited.values().flat_map(|(t, keys)| keys.iter().map(move |k| (k.as_str(), *t))).collect();

        for m in &parsed.mentions {
            let Some(target) = target_of.get(m.reference_key.as_str()) else { continue };
            let p = text_progression(parsed, m).expect("mention lies inside the body");
            records.locations.push(LocationRecord {
                doc_id: doc.id.clone(),
                target_id: target.id.clone(),
                progression: p,
                part: tertile(p).expect("progression in [0, 1]"),
                citing_year: doc.year,
                target_year: target.year,
            });
        }
        for (target, keys) in cited.values() {
            for key in keys {
                records.usages.push(reference_usage(parsed, key, target).expect("key taken from the reference list"));
            }
        }

        let spans = parsed.marker_spans();
        let mut sentence_targets: BTreeMap<usize, Vec<&TargetPaper>> = BTreeMap::new();
        for (i, c) in parsed.citations.iter().enumerate() {
            let mut hit: Vec<&TargetPaper> =
                c.reference_keys.iter().filter_map(|k| target_of.get(k.as_str()).copied()).collect();
            if let Some(first) = hit.first() {
                records.citations.push(citation_usage(parsed, i, first.year));
                let entry = sentence_targets.entry(c.sentence_index).or_default();
                entry.append(&mut hit);
            }
        }
        for (index, mut hosted) in sentence_targets {
            hosted.sort_by(|a, b| a.id.cmp(&b.id));
            hosted.dedup_by(|a, b| a.id == b.id);
            let text = prepare_sentence(&parsed.citation_sentences[index], &spans);
            let s = score(&text, self.lexicon);
            for target in hosted {
                records.sentiments.push(SentimentRecord {
                    doc_id: doc.id.clone(),
                    target_id: target.id.clone(),
                    sentence_index: index,
                    score: s,
                    citing_year: doc.year,
                    target_year: target.year,
                });
            }
        }

        for (target, _) in cited.values() {
            let textual = textual_from_vectors(target, doc, self.target_vectors.get(target.id.as_str()), doc_vector);
            let bibliographic = reference_relatedness(target, doc, self.config.coupling);
            let record = RelatednessRecord::new(doc, target, textual, bibliographic);
            result.missing.extend(record.textual_missing);
            result.missing.extend(record.bibliographic_missing);
            if record.has_value() {
                records.relatedness.push(record);
            }
        }
        result
    }
}

struct DocumentResult {
    records: AnalysisRecords,
    tally: Tally,
    has_fulltext: bool,
    markers: u64,
    unresolved: u64,
    warnings: u64,
    missing: Vec<MissingReason>,
}

/// Everything `citescope analyze` needs.
#[derive(Debug, Clone)]
pub struct AnalyzeRequest {
    pub corpus: PathBuf,
    pub targets: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub embeddings: EmbeddingSpec,
    pub config: AnalysisConfig,
}

pub fn sha256_hex(reader: impl BufRead) -> io::Result<String> {
    let mut hasher = Sha256::new();
    let mut reader = reader;
    io::copy(&mut reader, &mut hasher)?;
    Ok(format!("{:x}", hasher.finalize()))
}

fn file_digest(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|source| Error::Read { path: path.into(), source })?;
    sha256_hex(io::BufReader::new(file)).map_err(|source| Error::Read { path: path.into(), source })
}

/// Loads inputs, runs the analysis and returns the finished report.
pub fn run(request: &AnalyzeRequest) -> Result<Report> {
    let target_load = load_targets(&request.targets)?;
    let owned_lexicon;
    let (lexicon, lexicon_sha256) = match &request.lexicon {
        Some(path) => {
            owned_lexicon = ValenceLexicon::load(path)?;
            (&owned_lexicon, file_digest(path)?)
        }
        None => (bundled_lexicon(), sha256_hex(DEFAULT_LEXICON.as_bytes()).expect("in-memory read")),
    };
    let embedder = request.embeddings.build()?;
    let analyzer = Analyzer::new(&target_load.targets, lexicon, embedder.as_ref(), request.config)?;

    let file = File::open(&request.corpus).map_err(|source| Error::Read { path: request.corpus.clone(), source })?;
    let mut reader = CorpusReader::new(io::BufReader::new(file), request.corpus.display().to_string());
    let mut output = analyzer.analyze(reader.by_ref())?;
    let stats = reader.stats();
    output.ingest.documents_malformed = stats.malformed as u64;
    output.ingest.documents_invalid = stats.invalid as u64;
    output.ingest.targets_loaded = target_load.stats.loaded as u64;
    output.ingest.targets_skipped = target_load.stats.skipped() as u64;

    let mut report = output.into_report(&request.config)?;
    report.metadata = RunMetadata {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        corpus_sha256: file_digest(&request.corpus)?,
        targets_sha256: file_digest(&request.targets)?,
        lexicon_sha256,
        embeddings: match &request.embeddings {
            EmbeddingSpec::File(_) => "file".to_string(),
            other => other.to_string(),
        },
        embedding_model: embedder.model_id(),
        group_by: request.config.group_by,
        exclude_target_from_coupling: request.config.coupling.exclude_target,
        min_pairs: request.config.min_pairs,
    };
    Ok(report)
}

/// Writes `report.json` and the CSV files into `dir`. Files are staged in
/// a sibling temporary directory and moved in once all of them are written.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Write { path: dir.into(), source })?;
    let staging = tempfile::Builder::new()
        .prefix(".citescope-")
        .tempdir_in(dir)
        .map_err(|source| Error::Write { path: dir.into(), source })?;
    let mut staged = emit_csv(report, staging.path())?;
    let json = staging.path().join(REPORT_FILE);
    emit_json(report, &json)?;
    staged.push(json);

    let mut written = Vec::with_capacity(staged.len());
    for path in staged {
        let dest = dir.join(path.file_name().expect("staged file has a name"));
        fs::rename(&path, &dest).map_err(|source| Error::Write { path: dest.clone(), source })?;
        written.push(dest);
    }
    Ok(written)
}

/// Runs [`run`] and [`write_outputs`].
pub fn analyze_to_dir(request: &AnalyzeRequest, out: &Path) -> Result<Report> {
    let report = run(request)?;
    let files = write_outputs(&report, out)?;
    log::info!("wrote {} files to {}", files.len(), out.display());
    Ok(report)
}
