//! Seeded synthetic corpora with planted, per-year citation behaviour and
//! a ground-truth file recording both the planted parameters and the exact
//! values realized by the generated text.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CitingDocument, ReferenceEntry, Section, TargetPaper, MAX_YEAR, MIN_YEAR};
use crate::parser::{CorpusStats, StatsScope};

/// A per-year parameter: one value, a linear ramp over the year range, or
/// an explicit value for every year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Constant(f64),
    Values(Vec<f64>),
    Linear { from: f64, to: f64 },
}

impl Schedule {
    /// Value for year number `i` of `n`.
    pub fn at(&self, i: usize, n: usize) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Values(v) => v[i],
            Schedule::Linear { from, to } if n > 1 => from + (to - from) * i as f64 / (n - 1) as f64,
            Schedule::Linear { from, .. } => *from,
        }
    }

    fn check(&self, field: &str, years: usize, ok: impl Fn(f64) -> bool, expect: &str) -> Result<()> {
        if let Schedule::Values(v) = self {
            if v.len() != years {
                return Err(scenario_error(field, format!("expected {years} values, found {}", v.len())));
            }
        }
        for i in 0..years {
            let value = self.at(i, years);
            if !value.is_finite() || !ok(value) {
                let at = if matches!(self, Schedule::Values(_)) { format!("{field}[{i}]") } else { field.to_string() };
                return Err(scenario_error(&at, format!("{value} is not {expect}")));
            }
        }
        Ok(())
    }
}

fn scenario_error(field: &str, message: impl Into<String>) -> Error {
    Error::Scenario { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub start_year: i32,
    pub end_year: i32,
    pub targets: usize,
    pub target_year_min: i32,
    pub target_year_max: i32,
    /// Targets cited per document are drawn uniformly from 1 to this.
    pub max_targets_per_doc: usize,
    /// Non-target references per document.
    pub other_references: usize,
    pub docs_per_year: Schedule,
    /// Approximate body length in characters.
    pub body_chars: usize,
    /// Mean text progression of target mentions, strictly inside (0, 1).
    pub location_mean: Schedule,
    /// Beta concentration (alpha + beta) of mention positions.
    pub location_concentration: f64,
    /// Share of target references that are never mentioned in the body.
    pub unmentioned_share: f64,
    /// Share of mentioned target references that are mentioned 2 or 3 times.
    pub mmr_share: Schedule,
    /// Share of target citations that also cite a non-target reference.
    pub mrc_share: Schedule,
    /// Share of citation sentences carrying a positive word.
    pub positive_share: Schedule,
    /// Share of citation sentences carrying a negative word.
    pub negative_share: Schedule,
    /// Share of documents with a non-empty body.
    pub fulltext_share: f64,
    /// Share of documents with a non-empty abstract.
    pub abstract_share: f64,
    /// Share of documents using author-year markers instead of numeric ones.
    pub author_year_share: f64,
    /// Share of citing-abstract words taken from the cited targets' abstracts.
    pub vocabulary_overlap: Schedule,
    /// Share of non-target references naming a work the cited target also cites.
    pub coupling_overlap: Schedule,
}

impl Default for Scenario {
    /// Papers citing a fixed set of targets over 16 years, with mentions
    /// drifting towards the end of the text as the targets age.
    fn default() -> Self {
        Scenario {
            seed: 42,
            start_year: 2000,
            end_year: 2015,
            targets: 8,
            target_year_min: 1995,
            target_year_max: 2000,
            max_targets_per_doc: 2,
            other_references: 12,
            docs_per_year: Schedule::Constant(60.0),
            body_chars: 1500,
            location_mean: Schedule::Linear { from: 0.3, to: 0.5 },
            location_concentration: 8.0,
            unmentioned_share: 0.05,
            mmr_share: Schedule::Linear { from: 0.4, to: 0.2 },
            mrc_share: Schedule::Linear { from: 0.3, to: 0.5 },
            positive_share: Schedule::Constant(0.3),
            negative_share: Schedule::Constant(0.1),
            fulltext_share: 0.9,
            abstract_share: 0.9,
            author_year_share: 0.3,
            vocabulary_overlap: Schedule::Linear { from: 0.5, to: 0.3 },
            coupling_overlap: Schedule::Linear { from: 0.3, to: 0.15 },
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| scenario_error("toml", e.message().to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Scenario::from_toml(&text)
    }

    pub fn years(&self) -> usize {
        (self.end_year - self.start_year + 1).max(0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let year_ok = |y: i32| (MIN_YEAR..=MAX_YEAR).contains(&y);
        for (field, year) in [
            ("start_year", self.start_year),
            ("end_year", self.end_year),
            ("target_year_min", self.target_year_min),
            ("target_year_max", self.target_year_max),
        ] {
            if !year_ok(year) {
                return Err(scenario_error(field, format!("{year} outside [{MIN_YEAR}, {MAX_YEAR}]")));
            }
        }
        if self.end_year < self.start_year {
            return Err(scenario_error("end_year", "must not precede start_year"));
        }
        if self.target_year_max < self.target_year_min {
            return Err(scenario_error("target_year_max", "must not precede target_year_min"));
        }
        if self.target_year_max > self.start_year {
            return Err(scenario_error("target_year_max", "targets must be published by start_year"));
        }
        if self.targets == 0 {
            return Err(scenario_error("targets", "at least one target is required"));
        }
        if !(1..=self.targets).contains(&self.max_targets_per_doc) {
            return Err(scenario_error("max_targets_per_doc", format!("must lie in [1, {}]", self.targets)));
        }
        if !(1..=SURNAME_POOL).contains(&(self.other_references + self.max_targets_per_doc)) {
            return Err(scenario_error(
                "other_references",
                format!("must be at least 1 and leave room for targets within {SURNAME_POOL} references"),
            ));
        }
        if self.body_chars < 200 {
            return Err(scenario_error("body_chars", "must be at least 200"));
        }
        if !(self.location_concentration.is_finite() && self.location_concentration > 0.0) {
            return Err(scenario_error("location_concentration", "must be positive"));
        }
        for (field, share) in [
            ("unmentioned_share", self.unmentioned_share),
            ("fulltext_share", self.fulltext_share),
            ("abstract_share", self.abstract_share),
            ("author_year_share", self.author_year_share),
        ] {
            if !(0.0..=1.0).contains(&share) {
                return Err(scenario_error(field, format!("{share} is not a share in [0, 1]")));
            }
        }
        let n = self.years();
        self.docs_per_year.check("docs_per_year", n, |v| v >= 0.0, "a non-negative count")?;
        self.location_mean.check("location_mean", n, |v| v > 0.0 && v < 1.0, "inside (0, 1)")?;
        let share = |v: f64| (0.0..=1.0).contains(&v);
        self.mmr_share.check("mmr_share", n, share, "a share in [0, 1]")?;
        self.mrc_share.check("mrc_share", n, share, "a share in [0, 1]")?;
        self.positive_share.check("positive_share", n, share, "a share in [0, 1]")?;
        self.negative_share.check("negative_share", n, share, "a share in [0, 1]")?;
        self.vocabulary_overlap.check("vocabulary_overlap", n, share, "a share in [0, 1]")?;
        self.coupling_overlap.check("coupling_overlap", n, share, "a share in [0, 1]")?;
        for i in 0..n {
            let sum = self.positive_share.at(i, n) + self.negative_share.at(i, n);
            if sum > 1.0 {
                return Err(scenario_error(
                    &format!("negative_share[{i}]"),
                    format!("positive and negative shares sum to {sum}"),
                ));
            }
        }
        Ok(())
    }
}

/// Parameters planted for one year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedYear {
    pub location_mean: f64,
    pub mmr_share: f64,
    pub mrc_share: f64,
    pub positive_share: f64,
    pub negative_share: f64,
    pub vocabulary_overlap: f64,
    pub coupling_overlap: f64,
}

/// Three standard errors of the realized value around the planted one,
/// given the realized sample sizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseBounds {
    pub location_mean: f64,
    pub mmr_share: f64,
    pub mrc_share: f64,
}

/// Values realized by the generated text over full-text (document, target)
/// pairs of one year, computed from the generator's own bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RealizedYear {
    pub mean_progression: f64,
    pub pct_begin: f64,
    pub pct_middle: f64,
    pub pct_end: f64,
    pub n_mentions: u64,
    pub pct_smr: f64,
    pub pct_mmr: f64,
    pub mean_mentions: f64,
    pub n_references: u64,
    pub n_unmentioned: u64,
    pub pct_src: f64,
    pub pct_mrc: f64,
    pub mean_refs_per_citation: f64,
    pub n_citations: u64,
    /// (sentence, target) pairs by the polarity word placed in the sentence.
    pub positive_pairs: u64,
    pub negative_pairs: u64,
    pub neutral_pairs: u64,
    /// Mean Ochiai coupling over pairs where it is defined.
    pub mean_bibliographic: f64,
    pub n_bibliographic: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearTruth {
    pub year: i32,
    pub citing_docs: u64,
    pub docs_with_fulltext: u64,
    pub n_pairs: u64,
    pub planted: PlantedYear,
    pub noise: NoiseBounds,
    pub realized: RealizedYear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub scenario: Scenario,
    pub years: Vec<YearTruth>,
    pub stats_all: CorpusStats,
    pub stats_targets: CorpusStats,
}

pub struct SynthCorpus {
    pub targets: Vec<TargetPaper>,
    pub documents: Vec<CitingDocument>,
    pub truth: GroundTruth,
}

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const TARGETS_FILE: &str = "targets.jsonl";
pub const TRUTH_FILE: &str = "ground_truth.json";

impl SynthCorpus {
    /// Writes `corpus.jsonl`, `targets.jsonl` and `ground_truth.json`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|source| Error::Write { path: dir.into(), source })?;
        let mut corpus = String::new();
        for doc in &self.documents {
            corpus.push_str(&serde_json::to_string(doc)?);
            corpus.push('\n');
        }
        let mut targets = String::new();
        for t in &self.targets {
            targets.push_str(&serde_json::to_string(t)?);
            targets.push('\n');
        }
        let mut truth = serde_json::to_string_pretty(&self.truth)?;
        truth.push('\n');
        let mut written = Vec::new();
        for (name, contents) in [(CORPUS_FILE, corpus), (TARGETS_FILE, targets), (TRUTH_FILE, truth)] {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|source| Error::Write { path: path.clone(), source })?;
            written.push(path);
        }
        Ok(written)
    }
}

const FILLER: [&str; 40] = [
    "model",
    "data",
    "method",
    "sample",
    "result",
    "analysis",
    "approach",
    "study",
    "measure",
    "value",
    "system",
    "process",
    "signal",
    "feature",
    "network",
    "structure",
    "parameter",
    "estimate",
    "field",
    "region",
    "index",
    "series",
    "layer",
    "protocol",
    "design",
    "theory",
    "observation",
    "set",
    "group",
    "trial",
    "effect",
    "variable",
    "rate",
    "level",
    "unit",
    "domain",
    "survey",
    "test",
    "case",
    "frame",
];
const JOINERS: [&str; 7] = ["the", "of", "a", "in", "with", "for", "and"];
const POSITIVE_WORDS: [&str; 5] = ["excellent", "useful", "promising", "valuable", "effective"];
const NEGATIVE_WORDS: [&str; 5] = ["flawed", "weak", "poor", "wrong", "worse"];
const SURNAME_HEADS: [&str; 10] = ["Ka", "Lo", "Mi", "Ren", "Sa", "To", "Vel", "Du", "Bri", "Hal"];
const SURNAME_TAILS: [&str; 10] = ["berg", "ton", "ski", "ner", "lund", "ard", "ova", "ez", "man", "ow"];
const SURNAME_EXTRA: [&str; 6] = ["Østergaard", "Nuñez", "Çelik", "Ångström", "Ébert", "O'Neill"];
const SURNAME_POOL: usize = SURNAME_HEADS.len() * SURNAME_TAILS.len() + SURNAME_EXTRA.len();

fn surname_pool() -> Vec<String> {
    let mut pool: Vec<String> =
        SURNAME_HEADS.iter().flat_map(|h| SURNAME_TAILS.iter().map(move |t| format!("{h}{t}"))).collect();
    pool.extend(SURNAME_EXTRA.iter().map(|s| s.to_string()));
    pool
}

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| *FILLER.choose(rng).expect("non-empty")).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Body text under construction, with a running character count.
struct BodyBuilder {
    text: String,
    chars: usize,
    sentence: usize,
    words_in_sentence: usize,
    sentence_length: usize,
    polarity: Option<Polarity>,
}

impl BodyBuilder {
    fn new() -> Self {
        BodyBuilder {
            text: String::new(),
            chars: 0,
            sentence: 0,
            words_in_sentence: 0,
            sentence_length: 10,
            polarity: None,
        }
    }

    fn push(&mut self, s: &str) {
        self.text.push_str(s);
        self.chars += s.chars().count();
    }

    fn space(&mut self) {
        if self.chars > 0 && !self.text.ends_with('\n') {
            self.push(" ");
        }
    }

    fn next_word(&self, rng: &mut ChaCha8Rng) -> String {
        if self.words_in_sentence == 0 {
            let w = FILLER.choose(rng).expect("non-empty");
            let mut c = w.chars();
            let first = c.next().expect("non-empty word").to_ascii_uppercase();
            format!("{first}{}", c.as_str())
        } else if rng.random_bool(0.3) {
            JOINERS.choose(rng).expect("non-empty").to_string()
        } else {
            FILLER.choose(rng).expect("non-empty").to_string()
        }
    }

    fn word(&mut self, rng: &mut ChaCha8Rng) {
        let w = self.next_word(rng);
        self.put_word(&w, rng);
    }

    fn put_word(&mut self, w: &str, rng: &mut ChaCha8Rng) {
        self.space();
        self.push(w);
        self.words_in_sentence += 1;
        if self.words_in_sentence >= self.sentence_length {
            self.end_sentence(rng);
        }
    }

    fn end_sentence(&mut self, rng: &mut ChaCha8Rng) {
        self.push(".");
        self.push(if rng.random_bool(0.04) { "\n" } else { "" });
        self.sentence += 1;
        self.words_in_sentence = 0;
        self.sentence_length = rng.random_range(8..=16);
        self.polarity = None;
    }

    /// Appends words while the text is short of `target` characters,
    /// stopping before a word when that leaves the text closer to it.
    fn fill_to(&mut self, target: f64, rng: &mut ChaCha8Rng) {
        while (self.chars as f64) < target {
            let w = self.next_word(rng);
            let grown = self.chars + 1 + w.chars().count();
            if grown as f64 - target > target - self.chars as f64 {
                break;
            }
            self.put_word(&w, rng);
        }
    }

    /// Places `surface` and returns (char offset, sentence number).
    fn marker(&mut self, surface: &str, rng: &mut ChaCha8Rng) -> (usize, usize) {
        if self.words_in_sentence == 0 {
            self.word(rng);
        }
        self.space();
        let at = (self.chars, self.sentence);
        self.push(surface);
        (at.0, at.1)
    }

    fn finish(mut self, rng: &mut ChaCha8Rng) -> (String, usize) {
        if self.words_in_sentence > 0 {
            self.end_sentence(rng);
        }
        let text = self.text.trim_end().to_string();
        let chars = text.chars().count();
        (text, chars)
    }
}

struct Reference {
    surname: String,
    year: i32,
    target: Option<usize>,
}

/// One planned in-text citation.
struct Event {
    at: f64,
    refs: Vec<usize>,
}

#[derive(Default)]
struct YearTally {
    citing_docs: u64,
    docs_with_fulltext: u64,
    n_pairs: u64,
    progression_sum: f64,
    parts: [u64; 3],
    n_mentions: u64,
    mention_counts: Vec<u64>,
    citation_sizes: Vec<usize>,
    polarity: [u64; 3],
    coupling_sum: f64,
    coupling_n: u64,
}

/// Systematic sampling: over any run of `n` draws with share `p`, the
/// number of hits is within one of `n * p`.
struct Quota(f64);

impl Quota {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        Quota(rng.random())
    }

    fn take(&mut self, p: f64) -> bool {
        self.0 += p;
        if self.0 >= 1.0 {
            self.0 -= 1.0;
            true
        } else {
            false
        }
    }
}

/// Quota streams of one year.
struct YearStreams {
    mmr: Quota,
    mrc: Quota,
    positive: Quota,
    negative: Quota,
}

fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

impl YearTally {
    fn realized(&self) -> RealizedYear {
        let mentioned: Vec<u64> = self.mention_counts.iter().copied().filter(|&c| c > 0).collect();
        let smr = mentioned.iter().filter(|&&c| c == 1).count() as u64;
        let n_ref = mentioned.len() as u64;
        let src = self.citation_sizes.iter().filter(|&&c| c == 1).count() as u64;
        let n_cit = self.citation_sizes.len() as u64;
        let mean = |sum: f64, n: u64| if n == 0 { 0.0 } else { sum / n as f64 };
        RealizedYear {
            mean_progression: mean(self.progression_sum, self.n_mentions),
            pct_begin: percent(self.parts[0], self.n_mentions),
            pct_middle: percent(self.parts[1], self.n_mentions),
            pct_end: percent(self.parts[2], self.n_mentions),
            n_mentions: self.n_mentions,
            pct_smr: percent(smr, n_ref),
            pct_mmr: percent(n_ref - smr, n_ref),
            mean_mentions: mean(mentioned.iter().sum::<u64>() as f64, n_ref),
            n_references: n_ref,
            n_unmentioned: self.mention_counts.len() as u64 - n_ref,
            pct_src: percent(src, n_cit),
            pct_mrc: percent(n_cit - src, n_cit),
            mean_refs_per_citation: mean(self.citation_sizes.iter().sum::<usize>() as f64, n_cit),
            n_citations: n_cit,
            positive_pairs: self.polarity[0],
            negative_pairs: self.polarity[1],
            neutral_pairs: self.polarity[2],
            mean_bibliographic: mean(self.coupling_sum, self.coupling_n),
            n_bibliographic: self.coupling_n,
        }
    }

    fn noise(&self, planted: &PlantedYear, concentration: f64) -> NoiseBounds {
        let realized = self.realized();
        let se = |var: f64, n: u64| if n == 0 { 0.0 } else { 3.0 * (var / n as f64).sqrt() };
        let mu = planted.location_mean;
        NoiseBounds {
            location_mean: se(mu * (1.0 - mu) / (concentration + 1.0), self.n_mentions),
            mmr_share: se(planted.mmr_share * (1.0 - planted.mmr_share), realized.n_references),
            mrc_share: se(planted.mrc_share * (1.0 - planted.mrc_share), realized.n_citations),
        }
    }
}

/// `|a ∩ b| / sqrt(|a| |b|)` over sorted, deduplicated slices.
fn coupling(a: &[String], b: &[String]) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Some(shared as f64 / ((a.len() * b.len()) as f64).sqrt())
}

struct Generator<'a> {
    scenario: &'a Scenario,
    rng: ChaCha8Rng,
    surnames: Vec<String>,
    targets: Vec<TargetPaper>,
    target_surnames: Vec<String>,
    stats_all: CorpusStats,
    stats_targets: CorpusStats,
}

/// Pool of cited-work identifiers shared by targets and citing documents,
/// so bibliographic coupling has overlap to measure.
const WORK_POOL: usize = 400;

fn work_id(i: usize) -> String {
    format!("W{i:04}")
}

impl Generator<'_> {
    fn target_abstract(&mut self, topic: &[&str]) -> String {
        let n = self.rng.random_range(20..40);
        let words: Vec<&str> = (0..n)
            .map(|_| {
                let pool: &[&str] = if self.rng.random_bool(0.5) { topic } else { &FILLER };
                *pool.choose(&mut self.rng).expect("non-empty")
            })
            .collect();
        format!("{}.", words.join(" "))
    }

    /// Abstract drawing each word from the cited targets' abstracts with
    /// probability `overlap`, otherwise from the filler vocabulary.
    fn citing_abstract(&mut self, cited: &[usize], overlap: f64) -> String {
        let source: Vec<&str> =
            cited.iter().flat_map(|&t| self.targets[t].abstract_text.trim_end_matches('.').split(' ')).collect();
        let n = self.rng.random_range(20..40);
        let mut words = Vec::with_capacity(n);
        for _ in 0..n {
            let pool: &[&str] = if self.rng.random_bool(overlap) { &source } else { &FILLER };
            words.push(pool.choose(&mut self.rng).expect("non-empty").to_string());
        }
        format!("{}.", words.join(" "))
    }

    fn make_targets(&mut self) {
        let s = self.scenario;
        let mut names = self.surnames.clone();
        names.shuffle(&mut self.rng);
        for i in 0..s.targets {
            let topic: Vec<&str> = FILLER.choose_multiple(&mut self.rng, 4).copied().collect();
            let abstract_text = self.target_abstract(&topic);
            let reference_ids = (0..self.rng.random_range(10..30))
                .map(|_| work_id(self.rng.random_range(0..WORK_POOL)))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            self.targets.push(TargetPaper {
                id: format!("T{:03}", i + 1),
                year: self.rng.random_range(s.target_year_min..=s.target_year_max),
                title: format!("On the {} of {}", topic[0], topic[1]),
                abstract_text,
                reference_ids,
            });
            self.target_surnames.push(names[i % names.len()].clone());
        }
    }

    fn surface(&mut self, refs: &[usize], table: &[Reference], author_year: bool) -> String {
        if !author_year {
            let mut keys: Vec<usize> = refs.iter().map(|r| r + 1).collect();
            keys.sort_unstable();
            if keys.len() == 2 && keys[1] == keys[0] + 1 && self.rng.random_bool(0.5) {
                return format!("[{}–{}]", keys[0], keys[1]);
            }
            let sep = if self.rng.random_bool(0.5) { "," } else { ", " };
            let keys: Vec<String> = keys.iter().map(usize::to_string).collect();
            return format!("[{}]", keys.join(sep));
        }
        let etal = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { " et al." } else { "" };
        if refs.len() == 1 && self.rng.random_bool(0.3) {
            let r = &table[refs[0]];
            let e = etal(&mut self.rng);
            return format!("{}{e} ({})", r.surname, r.year);
        }
        let mut parts = Vec::new();
        for &i in refs {
            let r = &table[i];
            let e = etal(&mut self.rng);
            parts.push(format!("{}{e}, {}", r.surname, r.year));
        }
        parts.shuffle(&mut self.rng);
        format!("({})", parts.join("; "))
    }

    fn polarity(&mut self, planted: &PlantedYear, streams: &mut YearStreams) -> Polarity {
        if streams.positive.take(planted.positive_share) {
            return Polarity::Positive;
        }
        let rest = 1.0 - planted.positive_share;
        if rest > 0.0 && streams.negative.take(planted.negative_share / rest) {
            Polarity::Negative
        } else {
            Polarity::Neutral
        }
    }

    fn document(
        &mut self,
        year: i32,
        index: usize,
        planted: &PlantedYear,
        streams: &mut YearStreams,
        tally: &mut YearTally,
    ) -> CitingDocument {
        let s = self.scenario;
        let n_targets = self.rng.random_range(1..=s.max_targets_per_doc);
        let cited: Vec<usize> = rand::seq::index::sample(&mut self.rng, s.targets, n_targets).into_vec();
        let taken: BTreeSet<&str> = cited.iter().map(|&t| self.target_surnames[t].as_str()).collect();
        let mut free: Vec<String> = self.surnames.iter().filter(|n| !taken.contains(n.as_str())).cloned().collect();
        free.shuffle(&mut self.rng);

        let mut table: Vec<Reference> = cited
            .iter()
            .map(|&t| Reference {
                surname: self.target_surnames[t].clone(),
                year: self.targets[t].year,
                target: Some(t),
            })
            .collect();
        for name in free.into_iter().take(s.other_references) {
            table.push(Reference { surname: name, year: self.rng.random_range(1970..=year), target: None });
        }
        table.shuffle(&mut self.rng);
        let others: Vec<usize> = (0..table.len()).filter(|&i| table[i].target.is_none()).collect();

        let fulltext = self.rng.random_bool(s.fulltext_share);
        let author_year = self.rng.random_bool(s.author_year_share);

        // Plan citations: target mentions at Beta-distributed positions,
        // other references once each at uniform positions.
        let mu = planted.location_mean;
        let beta = Beta::new(mu * s.location_concentration, (1.0 - mu) * s.location_concentration)
            .expect("validated parameters");
        let mut events = Vec::new();
        let mut mention_counts = BTreeMap::new();
        if fulltext {
            for (i, r) in table.iter().enumerate() {
                if r.target.is_none() {
                    events.push(Event { at: self.rng.random(), refs: vec![i] });
                    continue;
                }
                let count = if self.rng.random_bool(s.unmentioned_share) {
                    0
                } else if streams.mmr.take(planted.mmr_share) {
                    self.rng.random_range(2..=3)
                } else {
                    1
                };
                mention_counts.insert(i, count);
                for _ in 0..count {
                    let mut refs = vec![i];
                    if streams.mrc.take(planted.mrc_share) {
                        refs.push(*others.choose(&mut self.rng).expect("other references exist"));
                    }
                    events.push(Event { at: beta.sample(&mut self.rng), refs });
                }
            }
        }
        events.sort_by(|a, b| a.at.total_cmp(&b.at));

        let length = (s.body_chars as f64 * self.rng.random_range(0.8..1.2)) as usize;
        let mut body = BodyBuilder::new();
        // (offset, sentence, refs, polarity) per placed marker.
        let mut placed = Vec::new();
        if fulltext {
            for event in &events {
                body.fill_to(event.at * length as f64, &mut self.rng);
                let surface = self.surface(&event.refs, &table, author_year);
                let (offset, sentence) = body.marker(&surface, &mut self.rng);
                let polarity = match body.polarity {
                    Some(p) => p,
                    None => {
                        let p = self.polarity(planted, streams);
                        let word = match p {
                            Polarity::Positive => POSITIVE_WORDS.choose(&mut self.rng),
                            Polarity::Negative => NEGATIVE_WORDS.choose(&mut self.rng),
                            Polarity::Neutral => None,
                        };
                        if let Some(word) = word {
                            body.push(" ");
                            body.push(word);
                        }
                        body.polarity = Some(p);
                        p
                    }
                };
                placed.push((offset, sentence, event.refs.clone(), polarity));
            }
            body.fill_to(length as f64, &mut self.rng);
        }
        let (text, n) = body.finish(&mut self.rng);

        let references: Vec<ReferenceEntry> = table
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let cited_id = match r.target {
                    Some(t) => self.targets[t].id.clone(),
                    None if self.rng.random_bool(planted.coupling_overlap) => {
                        let t = *cited.choose(&mut self.rng).expect("at least one target");
                        self.targets[t].reference_ids.choose(&mut self.rng).expect("targets cite works").clone()
                    }
                    None => work_id(self.rng.random_range(0..WORK_POOL)),
                };
                ReferenceEntry {
                    key: (i + 1).to_string(),
                    raw: format!("{}, A. ({}). {}.", r.surname, r.year, words(&mut self.rng, 4)),
                    cited_id: Some(cited_id),
                    first_author_surname: Some(r.surname.clone()),
                    pub_year: Some(r.year),
                    year_suffix: None,
                }
            })
            .collect();

        // Ground truth bookkeeping.
        tally.citing_docs += 1;
        let is_target = |i: usize| table[i].target.is_some();
        let all_sentences: BTreeSet<usize> = placed.iter().map(|p| p.1).collect();
        let target_markers: Vec<_> = placed.iter().filter(|p| p.2.iter().any(|&r| is_target(r))).collect();
        let target_sentences: BTreeSet<usize> = target_markers.iter().map(|p| p.1).collect();
        self.stats_all.documents += 1;
        self.stats_all.references += table.len() as u64;
        self.stats_all.reference_mentions += placed.iter().map(|p| p.2.len() as u64).sum::<u64>();
        self.stats_all.in_text_citations += placed.len() as u64;
        self.stats_all.citation_sentences += all_sentences.len() as u64;
        self.stats_targets.documents += 1;
        self.stats_targets.references += cited.len() as u64;
        self.stats_targets.reference_mentions +=
            placed.iter().map(|p| p.2.iter().filter(|&&r| is_target(r)).count() as u64).sum::<u64>();
        self.stats_targets.in_text_citations += target_markers.len() as u64;
        self.stats_targets.citation_sentences += target_sentences.len() as u64;

        if fulltext {
            tally.docs_with_fulltext += 1;
            tally.n_pairs += cited.len() as u64;
            for (offset, _, refs, _) in &placed {
                for _ in refs.iter().filter(|&&r| is_target(r)) {
                    tally.progression_sum += *offset as f64 / n as f64;
                    let part = if 3 * offset < n {
                        0
                    } else if 3 * offset < 2 * n {
                        1
                    } else {
                        2
                    };
                    tally.parts[part] += 1;
                    tally.n_mentions += 1;
                }
            }
            tally.mention_counts.extend(mention_counts.values().copied());
            tally.citation_sizes.extend(target_markers.iter().map(|p| p.2.len()));
            let mut hosted: BTreeMap<usize, (BTreeSet<usize>, Polarity)> = BTreeMap::new();
            for (_, sentence, refs, polarity) in &target_markers {
                let entry = hosted.entry(*sentence).or_insert_with(|| (BTreeSet::new(), *polarity));
                entry.0.extend(refs.iter().filter_map(|&r| table[r].target));
            }
            for (targets, polarity) in hosted.values() {
                let slot = match polarity {
                    Polarity::Positive => 0,
                    Polarity::Negative => 1,
                    Polarity::Neutral => 2,
                };
                tally.polarity[slot] += targets.len() as u64;
            }
            for &t in &cited {
                let target = &self.targets[t];
                let doc_ids: BTreeSet<String> =
                    references.iter().filter_map(|r| r.cited_id.clone()).filter(|id| *id != target.id).collect();
                let doc_ids: Vec<String> = doc_ids.into_iter().collect();
                if let Some(c) = coupling(&target.reference_ids, &doc_ids) {
                    tally.coupling_sum += c;
                    tally.coupling_n += 1;
                }
            }
        }

        let abstract_text = if self.rng.random_bool(s.abstract_share) {
            self.citing_abstract(&cited, planted.vocabulary_overlap)
        } else {
            String::new()
        };
        let sections = text
            .split('\n')
            .enumerate()
            .map(|(i, t)| Section { label: format!("Section {}", i + 1), text: t.to_string() })
            .collect();
        CitingDocument {
            id: format!("D{year}-{index:05}"),
            year,
            title: format!("A {} of {}", words(&mut self.rng, 1), words(&mut self.rng, 2)),
            abstract_text,
            sections,
            references,
        }
    }
}

/// Generates targets, corpus and ground truth for a validated scenario.
pub fn generate(scenario: &Scenario) -> Result<SynthCorpus> {
    scenario.validate()?;
    let mut g = Generator {
        scenario,
        rng: ChaCha8Rng::seed_from_u64(scenario.seed),
        surnames: surname_pool(),
        targets: Vec::new(),
        target_surnames: Vec::new(),
        stats_all: CorpusStats::empty(StatsScope::All),
        stats_targets: CorpusStats::empty(StatsScope::TargetsOnly),
    };
    g.make_targets();
    let n = scenario.years();
    let mut documents = Vec::new();
    let mut years = Vec::new();
    for i in 0..n {
        let year = scenario.start_year + i as i32;
        let planted = PlantedYear {
            location_mean: scenario.location_mean.at(i, n),
            mmr_share: scenario.mmr_share.at(i, n),
            mrc_share: scenario.mrc_share.at(i, n),
            positive_share: scenario.positive_share.at(i, n),
            negative_share: scenario.negative_share.at(i, n),
            vocabulary_overlap: scenario.vocabulary_overlap.at(i, n),
            coupling_overlap: scenario.coupling_overlap.at(i, n),
        };
        let mut streams = YearStreams {
            mmr: Quota::new(&mut g.rng),
            mrc: Quota::new(&mut g.rng),
            positive: Quota::new(&mut g.rng),
            negative: Quota::new(&mut g.rng),
        };
        let mut tally = YearTally::default();
        let count = scenario.docs_per_year.at(i, n).round() as usize;
        for d in 0..count {
            documents.push(g.document(year, d, &planted, &mut streams, &mut tally));
        }
        years.push(YearTruth {
            year,
            citing_docs: tally.citing_docs,
            docs_with_fulltext: tally.docs_with_fulltext,
            n_pairs: tally.n_pairs,
            noise: tally.noise(&planted, scenario.location_concentration),
            planted,
            realized: tally.realized(),
        });
    }
    Ok(SynthCorpus {
        truth: GroundTruth {
            scenario: scenario.clone(),
            years,
            stats_all: g.stats_all,
            stats_targets: g.stats_targets,
        },
        targets: g.targets,
        documents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentiment::bundled_lexicon;

    fn small() -> Scenario {
        Scenario { docs_per_year: Schedule::Constant(5.0), end_year: 2002, ..Scenario::default() }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.documents, b.documents);
        assert_eq!(a.truth, b.truth);
        let c = generate(&Scenario { seed: 7, ..small() }).unwrap();
        assert_ne!(a.documents, c.documents);
    }

    #[test]
    fn documents_validate() {
        let corpus = generate(&small()).unwrap();
        assert_eq!(corpus.documents.len(), 15);
        for doc in &corpus.documents {
            assert!(doc.validate().iter().all(|f| !f.is_error()), "{:?}", doc.validate());
        }
        for t in &corpus.targets {
            assert!(t.validate().iter().all(|f| !f.is_error()));
        }
    }

    #[test]
    fn word_lists_match_lexicon() {
        let lex = bundled_lexicon();
        for w in POSITIVE_WORDS {
            assert!(lex.valence(w).unwrap() > 0.0, "{w}");
        }
        for w in NEGATIVE_WORDS {
            assert!(lex.valence(w).unwrap() < 0.0, "{w}");
        }
        for w in FILLER.iter().chain(&JOINERS) {
            assert!(lex.valence(w).is_none() && !lex.is_negator(w), "{w}");
        }
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Linear { from: 0.2, to: 0.4 }.at(2, 3), 0.4);
        assert_eq!(Schedule::Linear { from: 0.2, to: 0.4 }.at(0, 1), 0.2);
        assert_eq!(Schedule::Values(vec![1.0, 2.0]).at(1, 2), 2.0);
        let s: Scenario = Scenario::from_toml("location_mean = { from = 0.2, to = 0.6 }\ndocs_per_year = 3").unwrap();
        assert_eq!(s.location_mean, Schedule::Linear { from: 0.2, to: 0.6 });
    }

    #[test]
    fn validation_names_the_field() {
        let err = Scenario::from_toml("end_year = 2001\nmmr_share = [0.1, 0.2, 0.3]").unwrap_err();
        assert_eq!(err.to_string(), "invalid scenario at mmr_share: expected 2 values, found 3");
        let err = Scenario::from_toml("start_year = 2000\nend_year = 2001\nlocation_mean = [0.5, 1.5]").unwrap_err();
        assert!(matches!(err, Error::Scenario { ref field, .. } if field == "location_mean[1]"), "{err}");
        let err = Scenario::from_toml("colour = 3").unwrap_err();
        assert!(matches!(err, Error::Scenario { ref field, .. } if field == "toml"));
    }
}
