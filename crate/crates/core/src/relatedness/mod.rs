//! Citing–cited relatedness: embedding cosine over title and abstract, and
//! bibliographic coupling measured with the Ochiai coefficient.

mod embed;

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

pub use embed::{
    EmbedItem, EmbedRequest, EmbedResponse, EmbeddingProvider, EmbeddingSpec, EmbeddingVector, HealthResponse,
    PrecomputedVectors, RemoteEmbedder, TestEmbedder, MAX_BATCH, TEST_EMBEDDER_DIM,
};

use crate::error::{Error, Result};
use crate::model::{CitingDocument, TargetPaper};
use crate::stats::MeanAccumulator;

/// `⟨u, v⟩ / (‖u‖‖v‖)`, clamped to [-1, 1].
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    cosine_values(&u.values, &v.values)
}

pub fn cosine_values(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

/// `|a ∩ b| / sqrt(|a|·|b|)`.
pub fn ochiai<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let shared = small.iter().filter(|x| large.contains(x)).count();
    Ok(shared as f64 / ((a.len() as f64) * (b.len() as f64)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingReason {
    EmptyAbstract,
    EmbeddingUnavailable,
    ZeroVector,
    /// The target lists no references.
    MissingBasis,
    /// The citing document has no resolved reference identifiers.
    NoCouplingBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingOptions {
    /// Drop the target's own id from the citing document's reference set.
    pub exclude_target: bool,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        CouplingOptions { exclude_target: true }
    }
}

/// Cosine of two already-embedded papers; missing when either side has no
/// abstract, no vector or a zero vector.
pub fn textual_from_vectors(
    target: &TargetPaper,
    doc: &CitingDocument,
    target_vec: Option<&EmbeddingVector>,
    doc_vec: Option<&EmbeddingVector>,
) -> Result<f64, MissingReason> {
    if target.abstract_text.trim().is_empty() || doc.abstract_text.trim().is_empty() {
        return Err(MissingReason::EmptyAbstract);
    }
    let (Some(t), Some(d)) = (target_vec, doc_vec) else {
        return Err(MissingReason::EmbeddingUnavailable);
    };
    cosine(t, d).map_err(|err| match err {
        Error::ZeroVector => MissingReason::ZeroVector,
        _ => MissingReason::EmbeddingUnavailable,
    })
}

/// Embeds both papers with `provider` and returns their cosine.
pub fn textual_relatedness(
    target: &TargetPaper,
    doc: &CitingDocument,
    provider: &dyn EmbeddingProvider,
) -> Result<Result<f64, MissingReason>> {
    if target.abstract_text.trim().is_empty() || doc.abstract_text.trim().is_empty() {
        return Ok(Err(MissingReason::EmptyAbstract));
    }
    let (target_text, doc_text) = (target.embedding_text(), doc.embedding_text());
    let vectors = provider
        .embed(&[EmbedItem { id: &target.id, text: &target_text }, EmbedItem { id: &doc.id, text: &doc_text }])?;
    Ok(textual_from_vectors(target, doc, vectors[0].as_ref(), vectors[1].as_ref()))
}

/// Ochiai coupling between the target's references and the resolved
/// `cited_id`s of the citing document.
pub fn reference_relatedness(
    target: &TargetPaper,
    doc: &CitingDocument,
    options: CouplingOptions,
) -> Result<f64, MissingReason> {
    let target_refs: HashSet<&str> = target.reference_ids.iter().map(String::as_str).collect();
    if target_refs.is_empty() {
        return Err(MissingReason::MissingBasis);
    }
    let doc_refs: HashSet<&str> = doc
        .references
        .iter()
        .filter_map(|r| r.cited_id.as_deref())
        .filter(|id| !(options.exclude_target && *id == target.id))
        .collect();
    ochiai(&target_refs, &doc_refs).map_err(|_| MissingReason::NoCouplingBasis)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatednessRecord {
    pub doc_id: String,
    pub target_id: String,
    pub textual: Option<f64>,
    pub bibliographic: Option<f64>,
    pub textual_missing: Option<MissingReason>,
    pub bibliographic_missing: Option<MissingReason>,
    pub citing_year: i32,
    pub target_year: i32,
}

impl RelatednessRecord {
    pub fn new(
        doc: &CitingDocument,
        target: &TargetPaper,
        textual: Result<f64, MissingReason>,
        bibliographic: Result<f64, MissingReason>,
    ) -> Self {
        RelatednessRecord {
            doc_id: doc.id.clone(),
            target_id: target.id.clone(),
            textual: textual.ok(),
            bibliographic: bibliographic.ok(),
            textual_missing: textual.err(),
            bibliographic_missing: bibliographic.err(),
            citing_year: doc.year,
            target_year: target.year,
        }
    }

    pub fn has_value(&self) -> bool {
        self.textual.is_some() || self.bibliographic.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelatednessRow {
    pub mean_textual: Option<f64>,
    pub mean_bibliographic: Option<f64>,
    pub n_textual: u64,
    pub n_bibliographic: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RelatednessAccumulator {
    textual: MeanAccumulator,
    bibliographic: MeanAccumulator,
}

impl RelatednessAccumulator {
    pub fn push(&mut self, record: &RelatednessRecord) {
        if let Some(t) = record.textual {
            self.textual.push(t);
        }
        if let Some(b) = record.bibliographic {
            self.bibliographic.push(b);
        }
    }

    pub fn merge(&mut self, other: &RelatednessAccumulator) {
        self.textual.merge(&other.textual);
        self.bibliographic.merge(&other.bibliographic);
    }

    pub fn finish(&self) -> Option<RelatednessRow> {
        if self.textual.count() == 0 && self.bibliographic.count() == 0 {
            return None;
        }
        Some(RelatednessRow {
            mean_textual: self.textual.mean(),
            mean_bibliographic: self.bibliographic.mean(),
            n_textual: self.textual.count(),
            n_bibliographic: self.bibliographic.count(),
        })
    }
}

pub fn relatedness_profile<'a>(records: impl IntoIterator<Item = &'a RelatednessRecord>) -> Option<RelatednessRow> {
    let mut acc = RelatednessAccumulator::default();
    for r in records {
        acc.push(r);
    }
    acc.finish()
}
