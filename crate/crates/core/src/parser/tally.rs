//! Corpus-level counts of references, mentions, citations and citation
//! sentences, for all cited works and for target papers only.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::model::{ParsedDocument, TargetSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatsScope {
    All,
    TargetsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub scope: StatsScope,
    pub documents: u64,
    pub references: u64,
    pub reference_mentions: u64,
    pub in_text_citations: u64,
    pub citation_sentences: u64,
}

impl CorpusStats {
    pub fn empty(scope: StatsScope) -> Self {
        CorpusStats {
            scope,
            documents: 0,
            references: 0,
            reference_mentions: 0,
            in_text_citations: 0,
            citation_sentences: 0,
        }
    }

    /// mentions >= citations >= sentences.
    pub fn is_ordered(&self) -> bool {
        self.reference_mentions >= self.in_text_citations && self.in_text_citations >= self.citation_sentences
    }

    fn merge(&mut self, other: &CorpusStats) {
        self.documents += other.documents;
        self.references += other.references;
        self.reference_mentions += other.reference_mentions;
        self.in_text_citations += other.in_text_citations;
        self.citation_sentences += other.citation_sentences;
    }
}

/// Mergeable counter pair. In the targets-only scope a reference counts when
/// its `cited_id` names a target, a citation counts when it contains at
/// least one such reference, and a sentence counts once when it hosts at
/// least one such citation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub all: CorpusStats,
    pub targets: CorpusStats,
}

impl Default for Tally {
    fn default() -> Self {
        Tally { all: CorpusStats::empty(StatsScope::All), targets: CorpusStats::empty(StatsScope::TargetsOnly) }
    }
}

impl Tally {
    pub fn add(&mut self, parsed: &ParsedDocument, targets: &TargetSet) {
        let target_keys: HashSet<&str> = parsed
            .doc
            .references
            .iter()
            .filter(|r| r.cited_id.as_ref().is_some_and(|id| targets.contains_key(id)))
            .map(|r| r.key.as_str())
            .collect();

        self.all.documents += 1;
        self.all.references += parsed.doc.references.len() as u64;
        self.all.reference_mentions += parsed.mentions.len() as u64;
        self.all.in_text_citations += parsed.citations.len() as u64;
        self.all.citation_sentences += parsed.citation_sentences.len() as u64;

        if target_keys.is_empty() {
            return;
        }
        self.targets.documents += 1;
        self.targets.references += target_keys.len() as u64;
        self.targets.reference_mentions +=
            parsed.mentions.iter().filter(|m| target_keys.contains(m.reference_key.as_str())).count() as u64;
        let mut sentences = HashSet::new();
        for citation in &parsed.citations {
            if citation.reference_keys.iter().any(|k| target_keys.contains(k.as_str())) {
                self.targets.in_text_citations += 1;
                sentences.insert(citation.sentence_index);
            }
        }
        self.targets.citation_sentences += sentences.len() as u64;
    }

    pub fn merge(&mut self, other: &Tally) {
        self.all.merge(&other.all);
        self.targets.merge(&other.targets);
    }
}

pub fn tally<'a>(
    parsed: impl IntoIterator<Item = &'a ParsedDocument>,
    targets: &TargetSet,
) -> (CorpusStats, CorpusStats) {
    let mut t = Tally::default();
    for doc in parsed {
        t.add(doc, targets);
    }
    (t.all, t.targets)
}
