//! Rule-based sentence segmentation over the document body.

use crate::model::RawMarker;

pub const DEFAULT_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// Abbreviations whose final period never ends a sentence.
#[derive(Debug, Clone)]
pub struct Abbreviations {
    entries: Vec<Vec<char>>,
}

impl Abbreviations {
    /// One abbreviation per line; blank lines and `#` comments are skipped.
    pub fn from_list(list: &str) -> Self {
        let entries = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.chars().flat_map(char::to_lowercase).collect())
            .collect();
        Abbreviations { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether `chars[..=end]` ends with a listed abbreviation that starts at
    /// a word boundary.
    fn ends_at(&self, chars: &[char], end: usize) -> bool {
        self.entries.iter().any(|abbr| {
            let len = abbr.len();
            if len == 0 || len > end + 1 {
                return false;
            }
            let start = end + 1 - len;
            let boundary = start == 0 || !chars[start - 1].is_alphanumeric();
            boundary && chars[start..=end].iter().zip(abbr).all(|(c, a)| c.to_lowercase().eq(std::iter::once(*a)))
        })
    }
}

impl Default for Abbreviations {
    fn default() -> Self {
        Abbreviations::from_list(DEFAULT_ABBREVIATIONS)
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits `chars` into sentence spans `[start, end)` in character offsets.
///
/// A sentence ends at `.`, `!` or `?` followed by whitespace or end of text,
/// unless the terminator lies inside a citation marker or closes a listed
/// abbreviation. Line breaks always end a sentence. Spans are trimmed of
/// surrounding whitespace, so together they cover every non-whitespace
/// character exactly once.
pub fn segment_chars(chars: &[char], markers: &[RawMarker], abbreviations: &Abbreviations) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_visible = 0;
    let mut marker = 0;

    for (i, &c) in chars.iter().enumerate() {
        while marker < markers.len() && markers[marker].char_end <= i {
            marker += 1;
        }
        let in_marker = markers.get(marker).is_some_and(|m| m.char_start <= i && i < m.char_end);

        if c == '\n' {
            if let Some(s) = start.take() {
                spans.push((s, last_visible + 1));
            }
            continue;
        }
        if c.is_whitespace() {
            continue;
        }
        if start.is_none() {
            start = Some(i);
        }
        last_visible = i;

        if in_marker || !is_terminator(c) {
            continue;
        }
        let at_boundary = chars.get(i + 1).is_none_or(|n| n.is_whitespace());
        if !at_boundary || (c == '.' && abbreviations.ends_at(chars, i)) {
            continue;
        }
        if let Some(s) = start.take() {
            spans.push((s, i + 1));
        }
    }
    if let Some(s) = start {
        spans.push((s, last_visible + 1));
    }
    spans
}
