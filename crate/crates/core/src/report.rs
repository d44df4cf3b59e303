//! Per-group aggregation of pair records and emission of plot-ready CSV
//! files and a JSON report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::location::{LocationAccumulator, LocationRecord, LocationRow};
use crate::mentions::{
    CitationAccumulator, CitationRow, CitationUsage, MentionAccumulator, MentionRow, ReferenceUsage,
};
use crate::parser::{CorpusStats, StatsScope};
use crate::relatedness::{RelatednessAccumulator, RelatednessRecord, RelatednessRow};
use crate::sentiment::{SentimentAccumulator, SentimentRecord, SentimentRow};
use crate::stats::percent;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    /// Citing year of the document.
    #[default]
    Year,
    /// Citing year minus the target's publication year.
    Age,
}

impl GroupBy {
    pub fn key(self, citing_year: i32, target_year: i32) -> i32 {
        match self {
            GroupBy::Year => citing_year,
            GroupBy::Age => citing_year - target_year,
        }
    }
}

/// Coverage bookkeeping for one citing document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRecord {
    pub doc_id: String,
    pub citing_year: i32,
    /// Distinct cited targets as (id, publication year).
    pub targets: Vec<(String, i32)>,
    pub has_fulltext: bool,
}

/// All per-pair records of an analysis run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecords {
    pub coverage: Vec<CoverageRecord>,
    pub locations: Vec<LocationRecord>,
    pub usages: Vec<ReferenceUsage>,
    pub citations: Vec<CitationUsage>,
    pub sentiments: Vec<SentimentRecord>,
    pub relatedness: Vec<RelatednessRecord>,
}

impl AnalysisRecords {
    pub fn extend(&mut self, other: AnalysisRecords) {
        self.coverage.extend(other.coverage);
        self.locations.extend(other.locations);
        self.usages.extend(other.usages);
        self.citations.extend(other.citations);
        self.sentiments.extend(other.sentiments);
        self.relatedness.extend(other.relatedness);
    }

    fn has_pair_records(&self) -> bool {
        !(self.locations.is_empty()
            && self.usages.is_empty()
            && self.citations.is_empty()
            && self.sentiments.is_empty()
            && self.relatedness.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub citing_docs: u64,
    pub docs_with_fulltext: u64,
    pub docs_with_fulltext_pct: f64,
    /// (citing document, target) pairs with full text in the group.
    pub n_pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearlyMetrics {
    pub group_key: i32,
    pub location: Option<LocationRow>,
    pub mentions: Option<MentionRow>,
    pub citations: Option<CitationRow>,
    pub sentiment: Option<SentimentRow>,
    pub relatedness: Option<RelatednessRow>,
    pub coverage: CoverageRow,
}

/// Provenance of a report. Contains only values that are fixed by the
/// inputs and analysis options, so identical runs yield identical reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub corpus_sha256: String,
    pub targets_sha256: String,
    pub lexicon_sha256: String,
    pub embeddings: String,
    pub embedding_model: String,
    pub group_by: GroupBy,
    pub exclude_target_from_coupling: bool,
    pub min_pairs: u64,
}

/// Ingestion and parsing counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub documents_read: u64,
    pub documents_malformed: u64,
    pub documents_invalid: u64,
    pub documents_without_fulltext: u64,
    pub targets_loaded: u64,
    pub targets_skipped: u64,
    pub markers: u64,
    pub unresolved_markers: u64,
    pub parse_warnings: u64,
}

impl IngestSummary {
    pub fn unresolved_rate(&self) -> f64 {
        if self.markers == 0 {
            0.0
        } else {
            self.unresolved_markers as f64 / self.markers as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub metadata: RunMetadata,
    pub ingest: IngestSummary,
    pub stats_all: CorpusStats,
    pub stats_targets: CorpusStats,
    pub notes: Vec<String>,
    pub rows: Vec<YearlyMetrics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateOptions {
    pub group_by: GroupBy,
    /// Groups with fewer (document, target) pairs are suppressed.
    pub min_pairs: u64,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        AggregateOptions { group_by: GroupBy::Year, min_pairs: 1 }
    }
}

#[derive(Default)]
struct GroupAccumulator {
    location: LocationAccumulator,
    mentions: MentionAccumulator,
    citations: CitationAccumulator,
    sentiment: SentimentAccumulator,
    relatedness: RelatednessAccumulator,
    citing_docs: u64,
    docs_with_fulltext: u64,
    pairs: u64,
}

/// Groups records by citing year or citation age and computes every
/// profile per group. Rows come out sorted by group key.
pub fn aggregate(records: &AnalysisRecords, options: AggregateOptions) -> Result<(Vec<YearlyMetrics>, Vec<String>)> {
    if !records.has_pair_records() {
        return Err(Error::EmptyAnalysis);
    }
    let by = options.group_by;
    let mut groups: BTreeMap<i32, GroupAccumulator> = BTreeMap::new();

    for c in &records.coverage {
        let keys: BTreeSet<i32> = match by {
            GroupBy::Year => BTreeSet::from([c.citing_year]),
            GroupBy::Age => c.targets.iter().map(|(_, ty)| by.key(c.citing_year, *ty)).collect(),
        };
        for key in keys {
            let g = groups.entry(key).or_default();
            g.citing_docs += 1;
            if c.has_fulltext {
                g.docs_with_fulltext += 1;
            }
        }
        if c.has_fulltext {
            for (_, ty) in &c.targets {
                groups.entry(by.key(c.citing_year, *ty)).or_default().pairs += 1;
            }
        }
    }
    for r in &records.locations {
        groups.entry(by.key(r.citing_year, r.target_year)).or_default().location.push(r.progression, r.part);
    }
    for r in &records.usages {
        groups.entry(by.key(r.citing_year, r.target_year)).or_default().mentions.push(r.mention_count);
    }
    for r in &records.citations {
        groups.entry(by.key(r.citing_year, r.target_year)).or_default().citations.push(r.reference_count);
    }
    for r in &records.sentiments {
        groups.entry(by.key(r.citing_year, r.target_year)).or_default().sentiment.push(&r.score);
    }
    for r in &records.relatedness {
        groups.entry(by.key(r.citing_year, r.target_year)).or_default().relatedness.push(r);
    }

    let mut notes = Vec::new();
    let mut rows = Vec::new();
    for (key, g) in groups {
        if g.pairs < options.min_pairs {
            notes.push(format!("group {key}: suppressed, {} pairs below minimum {}", g.pairs, options.min_pairs));
            continue;
        }
        let row = YearlyMetrics {
            group_key: key,
            location: g.location.finish(),
            mentions: g.mentions.finish(),
            citations: g.citations.finish(),
            sentiment: g.sentiment.finish(),
            relatedness: g.relatedness.finish(),
            coverage: CoverageRow {
                citing_docs: g.citing_docs,
                docs_with_fulltext: g.docs_with_fulltext,
                docs_with_fulltext_pct: if g.citing_docs == 0 {
                    0.0
                } else {
                    percent(g.docs_with_fulltext, g.citing_docs)
                },
                n_pairs: g.pairs,
            },
        };
        for (name, missing) in [
            ("location", row.location.is_none()),
            ("mention", row.mentions.is_none()),
            ("citation", row.citations.is_none()),
            ("sentiment", row.sentiment.is_none()),
            ("relatedness", row.relatedness.is_none()),
        ] {
            if missing {
                notes.push(format!("group {key}: no {name} records"));
            }
        }
        rows.push(row);
    }
    Ok((rows, notes))
}

/// Formats a number with 6 significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return String::new();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_default()
}

fn count(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

type Column = fn(&YearlyMetrics) -> String;

/// File name, header, and one renderer per non-key column.
fn csv_layouts() -> Vec<(&'static str, Vec<(&'static str, Column)>)> {
    vec![
        (
            "location_mean.csv",
            vec![
                ("mean_progression", |r| cell(r.location.map(|l| l.mean_progression))),
                ("n_mentions", |r| count(r.location.map(|l| l.n_mentions))),
            ],
        ),
        (
            "location_parts.csv",
            vec![
                ("pct_begin", |r| cell(r.location.map(|l| l.pct_begin))),
                ("pct_middle", |r| cell(r.location.map(|l| l.pct_middle))),
                ("pct_end", |r| cell(r.location.map(|l| l.pct_end))),
            ],
        ),
        (
            "mention_types.csv",
            vec![
                ("pct_smr", |r| cell(r.mentions.map(|m| m.pct_smr))),
                ("pct_mmr", |r| cell(r.mentions.map(|m| m.pct_mmr))),
            ],
        ),
        (
            "mention_means.csv",
            vec![
                ("mean_mentions", |r| cell(r.mentions.map(|m| m.mean_mentions))),
                ("n_references", |r| count(r.mentions.map(|m| m.n_references))),
                ("n_unmentioned", |r| count(r.mentions.map(|m| m.n_unmentioned))),
            ],
        ),
        (
            "citation_types.csv",
            vec![
                ("pct_src", |r| cell(r.citations.map(|c| c.pct_src))),
                ("pct_mrc", |r| cell(r.citations.map(|c| c.pct_mrc))),
            ],
        ),
        (
            "citation_means.csv",
            vec![
                ("mean_refs_per_citation", |r| cell(r.citations.map(|c| c.mean_refs_per_citation))),
                ("n_citations", |r| count(r.citations.map(|c| c.n_citations))),
            ],
        ),
        (
            "sentiment_shares.csv",
            vec![
                ("mean_pos", |r| cell(r.sentiment.map(|s| s.mean_pos))),
                ("mean_neu", |r| cell(r.sentiment.map(|s| s.mean_neu))),
                ("mean_neg", |r| cell(r.sentiment.map(|s| s.mean_neg))),
            ],
        ),
        (
            "sentiment_compound.csv",
            vec![
                ("mean_compound", |r| cell(r.sentiment.map(|s| s.mean_compound))),
                ("n_sentences", |r| count(r.sentiment.map(|s| s.n_sentences))),
            ],
        ),
        (
            "relatedness_textual.csv",
            vec![
                ("mean_textual", |r| cell(r.relatedness.and_then(|x| x.mean_textual))),
                ("n_textual", |r| count(r.relatedness.map(|x| x.n_textual))),
            ],
        ),
        (
            "relatedness_bibliographic.csv",
            vec![
                ("mean_bibliographic", |r| cell(r.relatedness.and_then(|x| x.mean_bibliographic))),
                ("n_bibliographic", |r| count(r.relatedness.map(|x| x.n_bibliographic))),
            ],
        ),
        (
            "coverage.csv",
            vec![
                ("citing_docs", |r| r.coverage.citing_docs.to_string()),
                ("docs_with_fulltext", |r| r.coverage.docs_with_fulltext.to_string()),
                ("docs_with_fulltext_pct", |r| format_sig6(r.coverage.docs_with_fulltext_pct)),
                ("n_pairs", |r| r.coverage.n_pairs.to_string()),
            ],
        ),
    ]
}

pub const TABLE1_FILE: &str = "table1.csv";

/// Renders every CSV file in memory as (file name, contents).
pub fn render_csv(report: &Report) -> Vec<(&'static str, String)> {
    let mut files = Vec::new();
    for (name, columns) in csv_layouts() {
        let mut out = String::from("group_key");
        for (header, _) in &columns {
            out.push(',');
            out.push_str(header);
        }
        out.push('\n');
        for row in &report.rows {
            write!(out, "{}", row.group_key).unwrap();
            for (_, render) in &columns {
                out.push(',');
                out.push_str(&render(row));
            }
            out.push('\n');
        }
        files.push((name, out));
    }

    let mut table = String::from("quantity,all_cited_works,targets_only\n");
    let (a, t) = (&report.stats_all, &report.stats_targets);
    for (label, all, targets) in [
        ("references", a.references, t.references),
        ("reference_mentions", a.reference_mentions, t.reference_mentions),
        ("in_text_citations", a.in_text_citations, t.in_text_citations),
        ("citation_sentences", a.citation_sentences, t.citation_sentences),
    ] {
        writeln!(table, "{label},{all},{targets}").unwrap();
    }
    files.push((TABLE1_FILE, table));
    files
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|source| Error::Write { path: path.clone(), source })?;
    Ok(path)
}

/// Writes the twelve CSV files into `dir` and returns their paths.
pub fn emit_csv(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    render_csv(report).into_iter().map(|(name, contents)| write_file(dir.join(name), &contents)).collect()
}

pub fn render_json(report: &Report) -> Result<String> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    Ok(json)
}

pub fn emit_json(report: &Report, path: &Path) -> Result<()> {
    write_file(path.to_path_buf(), &render_json(report)?).map(drop)
}

pub fn load_json(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
    Ok(serde_json::from_str(&text)?)
}

impl Report {
    pub fn new(rows: Vec<YearlyMetrics>, notes: Vec<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            metadata: RunMetadata::default(),
            ingest: IngestSummary::default(),
            stats_all: CorpusStats::empty(StatsScope::All),
            stats_targets: CorpusStats::empty(StatsScope::TargetsOnly),
            notes,
            rows,
        }
    }
}
