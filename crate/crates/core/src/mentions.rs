//! Reference mention types (SMR/MMR) and in-text citation types (SRC/MRC).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InTextCitation, ParsedDocument, TargetPaper};
use crate::stats::{percent, MeanAccumulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MentionKind {
    /// Mentioned exactly once in the body.
    Smr,
    /// Mentioned more than once.
    Mmr,
    /// Listed but never mentioned in the body.
    Unmentioned,
}

impl MentionKind {
    pub fn from_count(count: u64) -> Self {
        match count {
            0 => MentionKind::Unmentioned,
            1 => MentionKind::Smr,
            _ => MentionKind::Mmr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceUsage {
    pub doc_id: String,
    pub target_id: String,
    pub reference_key: String,
    pub mention_count: u64,
    pub kind: MentionKind,
    pub citing_year: i32,
    pub target_year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CitationKind {
    /// One reference in the citation.
    Src,
    /// Several references in the citation.
    Mrc,
}

impl CitationKind {
    pub fn from_count(count: usize) -> Self {
        if count >= 2 {
            CitationKind::Mrc
        } else {
            CitationKind::Src
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationUsage {
    pub doc_id: String,
    pub citation_index: usize,
    pub reference_count: usize,
    pub kind: CitationKind,
    pub citing_year: i32,
    pub target_year: i32,
}

/// Mention count and SMR/MMR kind of the reference `key`, which names `target`.
pub fn reference_usage(parsed: &ParsedDocument, key: &str, target: &TargetPaper) -> Result<ReferenceUsage> {
    if parsed.doc.reference(key).is_none() {
        return Err(Error::UnknownReference(key.to_string()));
    }
    let mention_count = parsed.mentions_of(key).count() as u64;
    Ok(ReferenceUsage {
        doc_id: parsed.doc.id.clone(),
        target_id: target.id.clone(),
        reference_key: key.to_string(),
        mention_count,
        kind: MentionKind::from_count(mention_count),
        citing_year: parsed.doc.year,
        target_year: target.year,
    })
}

/// SRC/MRC classification of the citation at `citation_index`.
pub fn citation_usage(parsed: &ParsedDocument, citation_index: usize, target_year: i32) -> CitationUsage {
    let citation: &InTextCitation = &parsed.citations[citation_index];
    let reference_count = citation.reference_keys.len();
    CitationUsage {
        doc_id: parsed.doc.id.clone(),
        citation_index,
        reference_count,
        kind: CitationKind::from_count(reference_count),
        citing_year: parsed.doc.year,
        target_year,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MentionRow {
    pub pct_smr: f64,
    pub pct_mmr: f64,
    pub mean_mentions: f64,
    /// Mentioned references (SMR + MMR).
    pub n_references: u64,
    /// Listed but unmentioned references, excluded from the shares.
    pub n_unmentioned: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MentionAccumulator {
    mentions: MeanAccumulator,
    smr: u64,
    unmentioned: u64,
}

impl MentionAccumulator {
    pub fn push(&mut self, mention_count: u64) {
        match MentionKind::from_count(mention_count) {
            MentionKind::Unmentioned => self.unmentioned += 1,
            kind => {
                if kind == MentionKind::Smr {
                    self.smr += 1;
                }
                self.mentions.push(mention_count as f64);
            }
        }
    }

    pub fn merge(&mut self, other: &MentionAccumulator) {
        self.mentions.merge(&other.mentions);
        self.smr += other.smr;
        self.unmentioned += other.unmentioned;
    }

    pub fn finish(&self) -> Option<MentionRow> {
        let n = self.mentions.count();
        let mean_mentions = self.mentions.mean()?;
        Some(MentionRow {
            pct_smr: percent(self.smr, n),
            pct_mmr: percent(n - self.smr, n),
            mean_mentions,
            n_references: n,
            n_unmentioned: self.unmentioned,
        })
    }
}

pub fn mention_profile<'a>(usages: impl IntoIterator<Item = &'a ReferenceUsage>) -> Option<MentionRow> {
    let mut acc = MentionAccumulator::default();
    for u in usages {
        acc.push(u.mention_count);
    }
    acc.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CitationRow {
    pub pct_src: f64,
    pub pct_mrc: f64,
    pub mean_refs_per_citation: f64,
    pub n_citations: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CitationAccumulator {
    refs: MeanAccumulator,
    src: u64,
}

impl CitationAccumulator {
    pub fn push(&mut self, reference_count: usize) {
        if CitationKind::from_count(reference_count) == CitationKind::Src {
            self.src += 1;
        }
        self.refs.push(reference_count as f64);
    }

    pub fn merge(&mut self, other: &CitationAccumulator) {
        self.refs.merge(&other.refs);
        self.src += other.src;
    }

    pub fn finish(&self) -> Option<CitationRow> {
        let n = self.refs.count();
        let mean_refs_per_citation = self.refs.mean()?;
        Some(CitationRow {
            pct_src: percent(self.src, n),
            pct_mrc: percent(n - self.src, n),
            mean_refs_per_citation,
            n_citations: n,
        })
    }
}

pub fn citation_profile<'a>(usages: impl IntoIterator<Item = &'a CitationUsage>) -> Option<CitationRow> {
    let mut acc = CitationAccumulator::default();
    for u in usages {
        acc.push(u.reference_count);
    }
    acc.finish()
}
