use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.tsv");

pub const MIN_VALENCE: f64 = -4.0;
pub const MAX_VALENCE: f64 = 4.0;

/// Token valences plus the booster and negator word lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValenceLexicon {
    pub entries: HashMap<String, f64>,
    pub boosters: HashMap<String, f64>,
    pub negators: HashSet<String>,
    /// Multi-word phrases (lowercase, single-space separated) whose valence
    /// replaces that of their final word. Empty unless loaded explicitly.
    pub idioms: HashMap<String, f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Valence,
    Booster,
    Negator,
}

impl ValenceLexicon {
    /// Parses the lexicon format: `token<TAB>valence` lines, then optional
    /// `#boosters` (`token<TAB>increment`) and `#negators` (`token`)
    /// sections. Any other line starting with `#` is a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lexicon = ValenceLexicon::default();
        let mut mode = Mode::Valence;
        let fail = |line: usize, message: String| Error::Lexicon { origin: origin.to_string(), line, message };

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end_matches('\r');
            match line.trim() {
                "#boosters" => {
                    mode = Mode::Booster;
                    continue;
                }
                "#negators" => {
                    mode = Mode::Negator;
                    continue;
                }
                "" => continue,
                _ if line.starts_with('#') => continue,
                _ => {}
            }
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or_default().trim().to_lowercase();
            if token.is_empty() {
                return Err(fail(line_no, "empty token".into()));
            }
            if mode == Mode::Negator {
                if !lexicon.negators.insert(token.clone()) {
                    return Err(fail(line_no, format!("duplicate negator {token:?}")));
                }
                continue;
            }
            let value_field = fields.next().ok_or_else(|| fail(line_no, format!("missing value for {token:?}")))?;
            let value: f64 =
                value_field.trim().parse().map_err(|_| fail(line_no, format!("invalid number {value_field:?}")))?;
            if !value.is_finite() {
                return Err(fail(line_no, format!("invalid number {value_field:?}")));
            }
            let table = match mode {
                Mode::Valence => {
                    if !(MIN_VALENCE..=MAX_VALENCE).contains(&value) {
                        return Err(fail(line_no, format!("valence {value} of {token:?} outside [-4, 4]")));
                    }
                    &mut lexicon.entries
                }
                Mode::Booster => &mut lexicon.boosters,
                Mode::Negator => unreachable!(),
            };
            if table.insert(token.clone(), value).is_some() {
                return Err(fail(line_no, format!("duplicate token {token:?}")));
            }
        }
        Ok(lexicon)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Adds idioms from `phrase<TAB>valence` lines.
    pub fn load_idioms(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |message: String| Error::Lexicon { origin: origin.to_string(), line: i + 1, message };
            let (phrase, value) = line.split_once('\t').ok_or_else(|| fail("expected phrase<TAB>valence".into()))?;
            let value: f64 = value.trim().parse().map_err(|_| fail(format!("invalid number {value:?}")))?;
            let phrase = phrase.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ");
            if self.idioms.insert(phrase.clone(), value).is_some() {
                return Err(fail(format!("duplicate idiom {phrase:?}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn valence(&self, lowercase_token: &str) -> Option<f64> {
        self.entries.get(lowercase_token).copied()
    }

    pub fn is_negator(&self, lowercase_token: &str) -> bool {
        self.negators.contains(lowercase_token) || lowercase_token.ends_with("n't")
    }

    /// The same lexicon with every valence negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.entries.values_mut().for_each(|v| *v = -*v);
        out.idioms.values_mut().for_each(|v| *v = -*v);
        out
    }
}

impl std::str::FromStr for ValenceLexicon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, "<string>")
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<ValenceLexicon> {
    ValenceLexicon::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_entries() {
        let lex: ValenceLexicon = "good\t1.9\nbad\t-2.5\nexcellent\t2.7\n".parse().unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.valence("bad"), Some(-2.5));
    }

    #[test]
    fn duplicate_token_names_line() {
        let err = ValenceLexicon::parse("good\t1.9\nbad\t-2.5\ngood\t2.0\n", "lex.tsv").unwrap_err();
        match err {
            Error::Lexicon { line, ref message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("good"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_valence_names_line() {
        let err = ValenceLexicon::parse("# header\nawful\t-4.5\n", "lex.tsv").unwrap_err();
        assert!(matches!(err, Error::Lexicon { line: 2, .. }));
        assert!(err.to_string().starts_with("lex.tsv:2:"));
    }

    #[test]
    fn empty_file_is_empty_lexicon() {
        let lex: ValenceLexicon = "".parse().unwrap();
        assert!(lex.is_empty());
    }

    #[test]
    fn sections_and_extra_columns() {
        let lex: ValenceLexicon = "Good\t1.9\t0.9\t[2, 2]\n#boosters\nvery\t0.293\n#negators\nnot\n".parse().unwrap();
        assert_eq!(lex.valence("good"), Some(1.9));
        assert_eq!(lex.boosters["very"], 0.293);
        assert!(lex.is_negator("not"));
        assert!(lex.is_negator("shouldn't"));
        assert!(!lex.is_negator("very"));
    }

    #[test]
    fn bundled_lexicon_parses() {
        let lex: ValenceLexicon = DEFAULT_LEXICON.parse().unwrap();
        assert_eq!(lex.len(), 40);
        assert!(!lex.boosters.is_empty());
        assert!(!lex.negators.is_empty());
    }

    #[test]
    fn idioms_load() {
        let mut lex = ValenceLexicon::default();
        lex.load_idioms("the bomb\t3\n", "idioms").unwrap();
        assert_eq!(lex.idioms["the bomb"], 3.0);
        assert!(lex.load_idioms("the bomb\t3\n", "idioms").is_err());
    }
}
