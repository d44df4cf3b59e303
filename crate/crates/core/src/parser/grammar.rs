//! Table-driven citation marker grammar and the marker scanner.

use regex::Regex;

use crate::error::{Error, Result};
use crate::model::{MarkerStyle, RawMarker};

pub const DEFAULT_GRAMMAR_TABLE: &str = include_str!("../../data/grammar.tsv");

#[derive(Debug, Clone)]
struct Rule {
    style: MarkerStyle,
    pattern: Regex,
}

/// Compiled marker grammar, one rule per marker style class.
#[derive(Debug, Clone)]
pub struct MarkerGrammar {
    rules: Vec<Rule>,
}

impl MarkerGrammar {
    /// Parses a grammar table: `<class>\t<pattern>` per line, `#` comments.
    pub fn from_table(table: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, line) in table.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (class, pattern) = line
                .split_once('\t')
                .ok_or_else(|| Error::Grammar { line: line_no, message: "expected <class><TAB><pattern>".into() })?;
            let style = MarkerStyle::from_name(class.trim())
                .ok_or_else(|| Error::Grammar { line: line_no, message: format!("unknown rule class {class:?}") })?;
            let pattern =
                Regex::new(pattern).map_err(|err| Error::Grammar { line: line_no, message: err.to_string() })?;
            rules.push(Rule { style, pattern });
        }
        if rules.is_empty() {
            return Err(Error::Grammar { line: 0, message: "grammar table has no rules".into() });
        }
        Ok(MarkerGrammar { rules })
    }

    /// All markers in `text`, left to right, non-overlapping, longest match
    /// at each start position.
    pub fn scan(&self, text: &str) -> Vec<RawMarker> {
        // Per rule: the leftmost match at or after the current position, or
        // None once the rule is exhausted.
        let mut pending: Vec<Option<regex::Match<'_>>> = self.rules.iter().map(|r| r.pattern.find(text)).collect();
        let mut found: Vec<(usize, usize, MarkerStyle)> = Vec::new();
        let mut pos = 0;
        loop {
            for (rule, slot) in self.rules.iter().zip(pending.iter_mut()) {
                if let Some(m) = slot {
                    if m.start() < pos {
                        *slot = rule.pattern.find_at(text, pos);
                    }
                }
            }
            let best = pending
                .iter()
                .enumerate()
                .filter_map(|(i, m)| m.map(|m| (i, m)))
                .min_by(|(ia, a), (ib, b)| a.start().cmp(&b.start()).then(b.end().cmp(&a.end())).then(ia.cmp(ib)));
            let Some((rule, m)) = best else { break };
            found.push((m.start(), m.end(), self.rules[rule].style));
            pos = m.end().max(m.start() + 1);
        }

        let mut markers = Vec::with_capacity(found.len());
        let mut chars_before = 0;
        let mut byte_cursor = 0;
        for (start, end, style) in found {
            chars_before += text[byte_cursor..start].chars().count();
            let surface = &text[start..end];
            let len = surface.chars().count();
            markers.push(RawMarker {
                char_start: chars_before,
                char_end: chars_before + len,
                surface: surface.to_string(),
                style,
            });
            chars_before += len;
            byte_cursor = end;
        }
        markers
    }
}

impl Default for MarkerGrammar {
    fn default() -> Self {
        MarkerGrammar::from_table(DEFAULT_GRAMMAR_TABLE).expect("bundled grammar table is valid")
    }
}
