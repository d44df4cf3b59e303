//! Citation location as text progression `i / n` and its begin/middle/end
//! classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ParsedDocument, ReferenceMention};
use crate::stats::{percent, MeanAccumulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TextPart {
    Begin,
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationRecord {
    pub doc_id: String,
    pub target_id: String,
    pub progression: f64,
    pub part: TextPart,
    pub citing_year: i32,
    pub target_year: i32,
}

/// `i / n` where `i` is the mention's first character and `n` the body length.
pub fn text_progression(parsed: &ParsedDocument, mention: &ReferenceMention) -> Result<f64> {
    progression(mention.char_start, parsed.body_char_count)
}

pub fn progression(offset: usize, body_chars: usize) -> Result<f64> {
    if body_chars == 0 {
        return Err(Error::EmptyBody);
    }
    let p = offset as f64 / body_chars as f64;
    if p > 1.0 {
        return Err(Error::InvalidProgression(p));
    }
    Ok(p)
}

/// Begin on `[0, 1/3)`, Middle on `[1/3, 2/3)`, End on `[2/3, 1]`.
pub fn tertile(progression: f64) -> Result<TextPart> {
    if !(0.0..=1.0).contains(&progression) {
        return Err(Error::InvalidProgression(progression));
    }
    // Rounded 1/3 and 2/3 scale to exactly 1.0 and 2.0, so a progression of
    // exactly i/n = 1/3 or 2/3 falls in the upper part.
    let scaled = progression * 3.0;
    Ok(if scaled < 1.0 {
        TextPart::Begin
    } else if scaled < 2.0 {
        TextPart::Middle
    } else {
        TextPart::End
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationRow {
    pub mean_progression: f64,
    pub pct_begin: f64,
    pub pct_middle: f64,
    pub pct_end: f64,
    pub n_mentions: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LocationAccumulator {
    mean: MeanAccumulator,
    begin: u64,
    middle: u64,
    end: u64,
}

impl LocationAccumulator {
    pub fn push(&mut self, progression: f64, part: TextPart) {
        self.mean.push(progression);
        match part {
            TextPart::Begin => self.begin += 1,
            TextPart::Middle => self.middle += 1,
            TextPart::End => self.end += 1,
        }
    }

    pub fn merge(&mut self, other: &LocationAccumulator) {
        self.mean.merge(&other.mean);
        self.begin += other.begin;
        self.middle += other.middle;
        self.end += other.end;
    }

    pub fn finish(&self) -> Option<LocationRow> {
        let n = self.mean.count();
        let mean_progression = self.mean.mean()?;
        Some(LocationRow {
            mean_progression,
            pct_begin: percent(self.begin, n),
            pct_middle: percent(self.middle, n),
            pct_end: percent(self.end, n),
            n_mentions: n,
        })
    }
}

/// Profile for one group of records; `None` for an empty group.
pub fn location_profile<'a>(records: impl IntoIterator<Item = &'a LocationRecord>) -> Option<LocationRow> {
    let mut acc = LocationAccumulator::default();
    for r in records {
        acc.push(r.progression, r.part);
    }
    acc.finish()
}
