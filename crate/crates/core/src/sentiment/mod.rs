//! Lexicon-and-rules citation sentiment: valence sums adjusted for emphasis,
//! boosters, contrast and negation, normalized into a compound score plus
//! positive/neutral/negative shares.

mod lexicon;

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

pub use lexicon::{load_lexicon, ValenceLexicon, DEFAULT_LEXICON, MAX_VALENCE, MIN_VALENCE};

use crate::model::CitationSentence;
use crate::stats::MeanAccumulator;

/// Normalization constant of the compound score.
pub const ALPHA: f64 = 15.0;
/// Valence increment for an all-caps word when the text mixes cases.
pub const CAPS_INCREMENT: f64 = 0.733;
/// Factor applied to a valence preceded by a negator.
pub const NEGATION_SCALAR: f64 = -0.74;
pub const EXCLAMATION_INCREMENT: f64 = 0.292;
pub const MAX_EXCLAMATIONS: usize = 4;
pub const QUESTION_INCREMENT: f64 = 0.18;
pub const MAX_QUESTION_EMPHASIS: f64 = 0.96;
/// Placeholder substituted for citation markers before scoring.
pub const CITATION_PLACEHOLDER: &str = "CITE";

static BUNDLED: LazyLock<ValenceLexicon> = LazyLock::new(|| DEFAULT_LEXICON.parse().expect("bundled lexicon is valid"));

/// The small lexicon shipped with the crate.
pub fn bundled_lexicon() -> &'static ValenceLexicon {
    &BUNDLED
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
}

impl SentimentScore {
    pub const NEUTRAL: SentimentScore = SentimentScore { pos: 0.0, neu: 1.0, neg: 0.0, compound: 0.0 };
}

/// `s / sqrt(s² + ALPHA)`, clamped to [-1, 1].
pub fn normalize(sum: f64) -> f64 {
    if sum == 0.0 {
        return 0.0;
    }
    (sum / (sum * sum + ALPHA).sqrt()).clamp(-1.0, 1.0)
}

/// Replaces every marker span inside the sentence with [`CITATION_PLACEHOLDER`].
/// `markers` are body offsets `[start, end)` sorted by start.
pub fn prepare_sentence(sentence: &CitationSentence, markers: &[(usize, usize)]) -> String {
    let mut out = String::with_capacity(sentence.text.len());
    let mut offset = sentence.char_start;
    let mut chars = sentence.text.chars();
    for &(start, end) in markers {
        if start < offset || end > sentence.char_end {
            continue;
        }
        out.extend(chars.by_ref().take(start - offset));
        out.push_str(CITATION_PLACEHOLDER);
        chars.by_ref().take(end - start).for_each(drop);
        offset = end;
    }
    out.extend(chars);
    out
}

struct Token<'a> {
    original: &'a str,
    lower: String,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation() || (!c.is_alphanumeric() && !c.is_whitespace())))
        .filter(|w| !w.is_empty())
        .map(|w| Token { original: w, lower: w.to_lowercase() })
        .collect()
}

fn is_all_caps(word: &str) -> bool {
    word.chars().any(char::is_alphabetic) && !word.chars().any(char::is_lowercase)
}

fn booster_scalar(lexicon: &ValenceLexicon, token: &Token<'_>, valence: f64, caps_differ: bool) -> f64 {
    let Some(&base) = lexicon.boosters.get(&token.lower) else {
        return 0.0;
    };
    let mut scalar = if valence < 0.0 { -base } else { base };
    if caps_differ && is_all_caps(token.original) {
        scalar += if valence > 0.0 { CAPS_INCREMENT } else { -CAPS_INCREMENT };
    }
    scalar
}

fn punctuation_emphasis(text: &str) -> f64 {
    let exclamations = text.matches('!').count().min(MAX_EXCLAMATIONS);
    let questions = text.matches('?').count();
    let question_emphasis = match questions {
        0 | 1 => 0.0,
        2 | 3 => questions as f64 * QUESTION_INCREMENT,
        _ => MAX_QUESTION_EMPHASIS,
    };
    exclamations as f64 * EXCLAMATION_INCREMENT + question_emphasis
}

/// Per-token valences after all word-level rules, before punctuation
/// emphasis.
fn token_valences(tokens: &[Token<'_>], lexicon: &ValenceLexicon) -> Vec<f64> {
    let scored: Vec<&Token<'_>> = tokens.iter().filter(|t| t.original != CITATION_PLACEHOLDER).collect();
    let caps = scored.iter().filter(|t| is_all_caps(t.original)).count();
    let caps_differ = caps > 0 && caps < scored.len();

    let mut valences = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        if lexicon.boosters.contains_key(&token.lower) {
            valences.push(0.0);
            continue;
        }
        let Some(mut valence) = lexicon.valence(&token.lower) else {
            valences.push(0.0);
            continue;
        };
        // "no" directly before another lexicon word acts as a negator only.
        if token.lower == "no" && tokens.get(i + 1).is_some_and(|n| lexicon.valence(&n.lower).is_some()) {
            valences.push(0.0);
            continue;
        }
        if (1..=3).any(|d| i >= d && tokens[i - d].lower == "no") {
            valence *= NEGATION_SCALAR;
        }
        if caps_differ && is_all_caps(token.original) {
            valence += if valence > 0.0 { CAPS_INCREMENT } else { -CAPS_INCREMENT };
        }
        for distance in 1..=3 {
            if i < distance {
                break;
            }
            let preceding = &tokens[i - distance];
            if lexicon.valence(&preceding.lower).is_some() {
                continue;
            }
            let damping = match distance {
                1 => 1.0,
                2 => 0.95,
                _ => 0.9,
            };
            valence += booster_scalar(lexicon, preceding, valence, caps_differ) * damping;
            if lexicon.is_negator(&preceding.lower) {
                valence *= NEGATION_SCALAR;
            }
        }
        if !lexicon.idioms.is_empty() {
            for len in [3usize, 2] {
                if i + 1 >= len {
                    let phrase = tokens[i + 1 - len..=i].iter().map(|t| t.lower.as_str()).collect::<Vec<_>>().join(" ");
                    if let Some(&v) = lexicon.idioms.get(&phrase) {
                        valence = v;
                        break;
                    }
                }
            }
        }
        valences.push(valence);
    }

    // Contrast: words before the first "but" are damped, words after it
    // are emphasized.
    if let Some(but) = tokens.iter().position(|t| t.lower == "but") {
        for (i, v) in valences.iter_mut().enumerate() {
            if i < but {
                *v *= 0.5;
            } else if i > but {
                *v *= 1.5;
            }
        }
    }
    valences
}

/// Scores prepared sentence text.
pub fn score(text: &str, lexicon: &ValenceLexicon) -> SentimentScore {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return SentimentScore::NEUTRAL;
    }
    let valences = token_valences(&tokens, lexicon);
    let emphasis = punctuation_emphasis(text);

    let mut sum: f64 = valences.iter().sum();
    if sum > 0.0 {
        sum += emphasis;
    } else if sum < 0.0 {
        sum -= emphasis;
    }
    let compound = normalize(sum);

    let mut pos_mass = 0.0;
    let mut neg_mass = 0.0;
    let mut neutral = 0.0;
    for &v in &valences {
        if v > 0.0 {
            pos_mass += v + 1.0;
        } else if v < 0.0 {
            neg_mass += 1.0 - v;
        } else {
            neutral += 1.0;
        }
    }
    if pos_mass > neg_mass {
        pos_mass += emphasis;
    } else if pos_mass < neg_mass {
        neg_mass += emphasis;
    }
    let total = pos_mass + neg_mass + neutral;
    SentimentScore { pos: pos_mass / total, neu: neutral / total, neg: neg_mass / total, compound }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentRecord {
    pub doc_id: String,
    pub target_id: String,
    pub sentence_index: usize,
    pub score: SentimentScore,
    pub citing_year: i32,
    pub target_year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentRow {
    pub mean_pos: f64,
    pub mean_neu: f64,
    pub mean_neg: f64,
    pub mean_compound: f64,
    pub n_sentences: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SentimentAccumulator {
    pos: MeanAccumulator,
    neu: MeanAccumulator,
    neg: MeanAccumulator,
    compound: MeanAccumulator,
}

impl SentimentAccumulator {
    pub fn push(&mut self, score: &SentimentScore) {
        self.pos.push(score.pos);
        self.neu.push(score.neu);
        self.neg.push(score.neg);
        self.compound.push(score.compound);
    }

    pub fn merge(&mut self, other: &SentimentAccumulator) {
        self.pos.merge(&other.pos);
        self.neu.merge(&other.neu);
        self.neg.merge(&other.neg);
        self.compound.merge(&other.compound);
    }

    pub fn finish(&self) -> Option<SentimentRow> {
        Some(SentimentRow {
            mean_pos: self.pos.mean()?,
            mean_neu: self.neu.mean()?,
            mean_neg: self.neg.mean()?,
            mean_compound: self.compound.mean()?,
            n_sentences: self.pos.count(),
        })
    }
}

pub fn sentiment_profile<'a>(records: impl IntoIterator<Item = &'a SentimentRecord>) -> Option<SentimentRow> {
    let mut acc = SentimentAccumulator::default();
    for r in records {
        acc.push(&r.score);
    }
    acc.finish()
}
