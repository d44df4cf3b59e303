//! Corpus data model: cited targets, citing documents and the artifacts the
//! citation parser produces from them.
//!
//! Corpus and target files are line-delimited JSON, one record per line.
//! Character offsets everywhere in this crate count Unicode scalar values of
//! the document body, which is the section texts joined by a single `\n`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Separator inserted between consecutive section texts in the body.
pub const SECTION_SEPARATOR: char = '\n';

pub const MIN_YEAR: i32 = 1800;
pub const MAX_YEAR: i32 = 2100;

/// A cited (highly cited) paper under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPaper {
    pub id: String,
    pub year: i32,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub reference_ids: Vec<String>,
}

impl TargetPaper {
    pub fn validate(&self) -> Vec<Finding> {
        let mut findings = Vec::new();
        if self.id.trim().is_empty() {
            findings.push(Finding::error("id", "target id is empty"));
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&self.year) {
            findings.push(Finding::error("year", format!("year {} outside [{MIN_YEAR}, {MAX_YEAR}]", self.year)));
        }
        let mut seen = HashSet::new();
        for (i, rid) in self.reference_ids.iter().enumerate() {
            if !seen.insert(rid.as_str()) {
                findings.push(Finding::error(format!("reference_ids[{i}]"), format!("duplicate reference id {rid:?}")));
            }
            if *rid == self.id {
                findings.push(Finding::error(format!("reference_ids[{i}]"), "target lists itself as a reference"));
            }
        }
        findings
    }

    pub fn embedding_text(&self) -> String {
        embedding_text(&self.title, &self.abstract_text)
    }
}

/// Text handed to embedding providers for a paper.
pub fn embedding_text(title: &str, abstract_text: &str) -> String {
    format!("{title}. {abstract_text}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub label: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub key: String,
    pub raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_author_surname: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pub_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year_suffix: Option<char>,
}

/// A citing paper with its sectioned body text and reference list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitingDocument {
    pub id: String,
    pub year: i32,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub sections: Vec<Section>,
    pub references: Vec<ReferenceEntry>,
}

impl CitingDocument {
    /// Section texts joined by [`SECTION_SEPARATOR`]. Title, abstract and the
    /// reference list are not part of the body.
    pub fn body(&self) -> String {
        let mut body = String::with_capacity(self.sections.iter().map(|s| s.text.len() + 1).sum());
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                body.push(SECTION_SEPARATOR);
            }
            body.push_str(&section.text);
        }
        body
    }

    /// Number of characters `n` in the body.
    pub fn body_char_count(&self) -> usize {
        let text: usize = self.sections.iter().map(|s| s.text.chars().count()).sum();
        text + self.sections.len().saturating_sub(1)
    }

    /// False when every section is blank; such documents are left out of all
    /// metrics and only show up in coverage figures.
    pub fn has_body(&self) -> bool {
        self.sections.iter().any(|s| !s.text.trim().is_empty())
    }

    pub fn reference(&self, key: &str) -> Option<&ReferenceEntry> {
        self.references.iter().find(|r| r.key == key)
    }

    pub fn embedding_text(&self) -> String {
        embedding_text(&self.title, &self.abstract_text)
    }

    pub fn validate(&self) -> Vec<Finding> {
        let mut findings = Vec::new();
        if self.id.trim().is_empty() {
            findings.push(Finding::error("id", "document id is empty"));
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&self.year) {
            findings.push(Finding::error("year", format!("year {} outside [{MIN_YEAR}, {MAX_YEAR}]", self.year)));
        }
        if self.sections.is_empty() {
            findings.push(Finding::error("sections", "document has no sections"));
        }
        for (i, section) in self.sections.iter().enumerate() {
            if section.text.is_empty() {
                findings.push(Finding::warning(
                    format!("sections[{i}].text"),
                    format!("section {:?} has no text", section.label),
                ));
            }
        }
        let mut keys = HashSet::new();
        for (i, entry) in self.references.iter().enumerate() {
            let path = format!("references[{i}]");
            if entry.key.is_empty() {
                findings.push(Finding::error(format!("{path}.key"), "reference key is empty"));
            } else if !keys.insert(entry.key.as_str()) {
                findings
                    .push(Finding::error(format!("{path}.key"), format!("duplicate reference key {:?}", entry.key)));
            }
            if entry.cited_id.as_deref().is_some_and(|id| id.trim().is_empty()) {
                findings.push(Finding::error(format!("{path}.cited_id"), "cited_id is empty"));
            }
            if let Some(suffix) = entry.year_suffix {
                if entry.pub_year.is_none() {
                    findings.push(Finding::error(format!("{path}.year_suffix"), "year_suffix given without pub_year"));
                }
                if !suffix.is_ascii_lowercase() {
                    findings.push(Finding::error(
                        format!("{path}.year_suffix"),
                        format!("year_suffix {suffix:?} is not a lowercase letter"),
                    ));
                }
            }
        }
        findings
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// One validation result, addressed by a JSON-ish field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Finding {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding { severity: Severity::Error, path: path.into(), message: message.into() }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding { severity: Severity::Warning, path: path.into(), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.path, self.message)
    }
}

pub fn validate_document(doc: &CitingDocument) -> Vec<Finding> {
    doc.validate()
}

/// Bibliographic style of a citation marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkerStyle {
    NumericBracket,
    AuthorYearParenthetical,
    AuthorYearNarrative,
}

impl MarkerStyle {
    pub fn name(self) -> &'static str {
        match self {
            MarkerStyle::NumericBracket => "numeric-bracket",
            MarkerStyle::AuthorYearParenthetical => "author-year-parenthetical",
            MarkerStyle::AuthorYearNarrative => "author-year-narrative",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "numeric-bracket" => Some(MarkerStyle::NumericBracket),
            "author-year-parenthetical" => Some(MarkerStyle::AuthorYearParenthetical),
            "author-year-narrative" => Some(MarkerStyle::AuthorYearNarrative),
            _ => None,
        }
    }
}

/// A citation marker found in the body, before resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMarker {
    pub char_start: usize,
    pub char_end: usize,
    pub surface: String,
    pub style: MarkerStyle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnresolvedReason {
    NoMatchingKey,
    AmbiguousMatch,
    OutOfRangeIndex,
}

impl fmt::Display for UnresolvedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnresolvedReason::NoMatchingKey => "no matching reference",
            UnresolvedReason::AmbiguousMatch => "ambiguous reference",
            UnresolvedReason::OutOfRangeIndex => "index out of range",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedMarker {
    pub marker: RawMarker,
    pub reason: UnresolvedReason,
}

/// A resolved marker: one occurrence pointing at one or more references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InTextCitation {
    pub char_start: usize,
    pub char_end: usize,
    pub reference_keys: Vec<String>,
    pub style: MarkerStyle,
    pub sentence_index: usize,
}

/// One (citation, reference) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceMention {
    pub citation_index: usize,
    pub reference_key: String,
    pub char_start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationSentence {
    pub char_start: usize,
    pub char_end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub char_start: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedDocument {
    pub doc: CitingDocument,
    pub body_char_count: usize,
    pub citations: Vec<InTextCitation>,
    pub mentions: Vec<ReferenceMention>,
    pub citation_sentences: Vec<CitationSentence>,
    pub unresolved: Vec<UnresolvedMarker>,
    pub warnings: Vec<ParseWarning>,
}

impl ParsedDocument {
    pub fn mentions_of<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a ReferenceMention> + 'a {
        self.mentions.iter().filter(move |m| m.reference_key == key)
    }

    /// Every marker span in the body, resolved or not, in body order.
    pub fn marker_spans(&self) -> Vec<(usize, usize)> {
        let mut spans: Vec<_> = self
            .citations
            .iter()
            .map(|c| (c.char_start, c.char_end))
            .chain(self.unresolved.iter().map(|u| (u.marker.char_start, u.marker.char_end)))
            .collect();
        spans.sort_unstable();
        spans
    }
}

/// Target papers keyed by id, iterated in id order.
pub type TargetSet = BTreeMap<String, TargetPaper>;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub lines: usize,
    pub loaded: usize,
    pub malformed: usize,
    pub invalid: usize,
}

impl LoadStats {
    pub fn skipped(&self) -> usize {
        self.malformed + self.invalid
    }
}

/// Streaming reader over a line-delimited corpus. Malformed lines and
/// documents with error findings are skipped and counted in [`LoadStats`].
pub struct CorpusReader<R> {
    lines: std::io::Lines<R>,
    origin: String,
    line_no: usize,
    seen: HashSet<String>,
    stats: LoadStats,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, origin: impl Into<String>) -> Self {
        CorpusReader {
            lines: reader.lines(),
            origin: origin.into(),
            line_no: 0,
            seen: HashSet::new(),
            stats: LoadStats::default(),
        }
    }

    pub fn stats(&self) -> LoadStats {
        self.stats
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<CitingDocument>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(source) => {
                    return Some(Err(Error::Read { path: self.origin.clone().into(), source }));
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            self.stats.lines += 1;
            let doc: CitingDocument = match serde_json::from_str(&line) {
                Ok(doc) => doc,
                Err(err) => {
                    log::warn!("{}:{}: skipping malformed record: {err}", self.origin, self.line_no);
                    self.stats.malformed += 1;
                    continue;
                }
            };
            let mut findings = doc.validate();
            if !self.seen.insert(doc.id.clone()) {
                findings.push(Finding::error("id", format!("duplicate document id {:?}", doc.id)));
            }
            if let Some(first) = findings.iter().find(|f| f.is_error()) {
                log::warn!("{}:{}: skipping document {:?}: {first}", self.origin, self.line_no, doc.id);
                self.stats.invalid += 1;
                continue;
            }
            self.stats.loaded += 1;
            return Some(Ok(doc));
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Read { path: path.into(), source })?;
    Ok(CorpusReader::new(BufReader::new(file), path.display().to_string()))
}

#[derive(Debug, Clone, Default)]
pub struct TargetLoad {
    pub targets: TargetSet,
    pub stats: LoadStats,
}

pub fn read_targets(reader: impl BufRead, origin: &str) -> Result<TargetLoad> {
    let mut load = TargetLoad::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Read { path: origin.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        load.stats.lines += 1;
        let target: TargetPaper = match serde_json::from_str(&line) {
            Ok(t) => t,
            Err(err) => {
                log::warn!("{origin}:{}: skipping malformed target: {err}", i + 1);
                load.stats.malformed += 1;
                continue;
            }
        };
        if load.targets.contains_key(&target.id) {
            return Err(Error::DuplicateTarget(target.id));
        }
        if let Some(first) = target.validate().into_iter().find(Finding::is_error) {
            log::warn!("{origin}:{}: skipping target {:?}: {first}", i + 1, target.id);
            load.stats.invalid += 1;
            continue;
        }
        load.stats.loaded += 1;
        load.targets.insert(target.id.clone(), target);
    }
    Ok(load)
}

pub fn load_targets(path: impl AsRef<Path>) -> Result<TargetLoad> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Read { path: path.into(), source })?;
    read_targets(BufReader::new(file), &path.display().to_string())
}
