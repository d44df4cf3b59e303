//! Line-by-line checks of corpus and target files without running an analysis.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CitingDocument, Finding, Severity, TargetPaper};
use crate::parser::CitationParser;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedFinding {
    pub origin: String,
    pub line: usize,
    /// Record id, when the line parsed far enough to have one.
    pub id: Option<String>,
    pub finding: Finding,
}

impl fmt::Display for LocatedFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.origin, self.line)?;
        if let Some(id) = &self.id {
            write!(f, "{id}: ")?;
        }
        write!(f, "{}", self.finding)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub documents: usize,
    pub targets: usize,
    pub findings: Vec<LocatedFinding>,
}

impl ValidationReport {
    pub fn errors(&self) -> usize {
        self.findings.iter().filter(|f| f.finding.is_error()).count()
    }

    pub fn warnings(&self) -> usize {
        self.findings.len() - self.errors()
    }

    pub fn is_clean(&self) -> bool {
        self.errors() == 0
    }
}

fn records<T: serde::de::DeserializeOwned>(
    reader: impl BufRead,
    origin: &str,
    report: &mut ValidationReport,
    mut check: impl FnMut(&T) -> (String, Vec<Finding>),
) -> Result<usize> {
    let mut seen = HashSet::new();
    let mut count = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Read { path: origin.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        count += 1;
        let at = |id: Option<String>, finding| LocatedFinding { origin: origin.to_string(), line: i + 1, id, finding };
        match serde_json::from_str::<T>(&line) {
            Err(err) => report.findings.push(at(None, Finding::error("", format!("malformed record: {err}")))),
            Ok(record) => {
                let (id, mut findings) = check(&record);
                if !seen.insert(id.clone()) {
                    findings.push(Finding::error("id", format!("duplicate id {id:?}")));
                }
                report.findings.extend(findings.into_iter().map(|f| at(Some(id.clone()), f)));
            }
        }
    }
    Ok(count)
}

/// Checks every record of both inputs. Besides schema findings, documents
/// get a warning for each in-text marker that does not resolve.
pub fn validate_inputs(
    corpus: impl BufRead,
    corpus_origin: &str,
    targets: impl BufRead,
    targets_origin: &str,
) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let parser = CitationParser::shared();
    report.documents = records(corpus, corpus_origin, &mut report, |doc: &CitingDocument| {
        let mut findings = doc.validate();
        if !findings.iter().any(Finding::is_error) {
            for u in parser.extract(doc.clone()).unresolved {
                findings.push(Finding {
                    severity: Severity::Warning,
                    path: format!("body[{}]", u.marker.char_start),
                    message: format!("marker {:?} unresolved ({})", u.marker.surface, u.reason),
                });
            }
        }
        (doc.id.clone(), findings)
    })?;
    report.targets = records(targets, targets_origin, &mut report, |t: &TargetPaper| (t.id.clone(), t.validate()))?;
    Ok(report)
}

pub fn validate_files(corpus: &Path, targets: &Path) -> Result<ValidationReport> {
    let open = |p: &Path| File::open(p).map(BufReader::new).map_err(|source| Error::Read { path: p.into(), source });
    validate_inputs(open(corpus)?, &corpus.display().to_string(), open(targets)?, &targets.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"id":"A","year":2001,"title":"t","abstract":"","sections":[{"label":"B","text":"See [1] and [3]."}],"references":[{"key":"1","raw":"x","cited_id":"T"}]}"#;
    const TARGET: &str = r#"{"id":"T","year":2000,"title":"t","abstract":"a","reference_ids":[]}"#;

    #[test]
    fn clean_input_with_unresolved_marker_warning() {
        let r = validate_inputs(DOC.as_bytes(), "c", TARGET.as_bytes(), "t").unwrap();
        assert_eq!((r.documents, r.targets, r.errors(), r.warnings()), (1, 1, 0, 1));
        assert!(r.findings[0].to_string().starts_with("c:1: A: warning: body[12]: marker \"[3]\" unresolved"));
    }

    #[test]
    fn duplicate_reference_key_is_an_error() {
        let doc = DOC.replace(r#"}]}"#, r#"},{"key":"1","raw":"y"}]}"#);
        let r = validate_inputs(doc.as_bytes(), "c", "".as_bytes(), "t").unwrap();
        assert!(!r.is_clean());
        assert!(r.findings.iter().any(|f| f.finding.message.contains("duplicate reference key")));
    }

    #[test]
    fn malformed_and_duplicate_records() {
        let corpus = format!("{DOC}\n{{oops\n\n{DOC}\n");
        let r = validate_inputs(corpus.as_bytes(), "c", "".as_bytes(), "t").unwrap();
        assert_eq!(r.documents, 3);
        let lines: Vec<_> = r.findings.iter().filter(|f| f.finding.is_error()).map(|f| f.line).collect();
        assert_eq!(lines, [2, 4]);
    }

    #[test]
    fn empty_inputs_are_clean() {
        let r = validate_inputs("".as_bytes(), "c", "".as_bytes(), "t").unwrap();
        assert_eq!((r.documents, r.targets), (0, 0));
        assert!(r.is_clean());
    }
}
