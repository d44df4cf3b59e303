//! Resolution of raw markers against a document's reference list.

use crate::model::{InTextCitation, MarkerStyle, RawMarker, ReferenceEntry, UnresolvedMarker, UnresolvedReason};

/// Resolves a marker to reference keys in marker order. Duplicates are kept
/// so the caller can report them.
pub(crate) fn resolve_keys(marker: &RawMarker, refs: &[ReferenceEntry]) -> Result<Vec<String>, UnresolvedReason> {
    match marker.style {
        MarkerStyle::NumericBracket => resolve_numeric(&marker.surface, refs),
        MarkerStyle::AuthorYearParenthetical => {
            let inner = marker.surface.trim_start_matches('(').trim_end_matches(')');
            inner
                .split(';')
                .map(|segment| {
                    let (names, year) = segment.rsplit_once(',').ok_or(UnresolvedReason::NoMatchingKey)?;
                    resolve_author_year(names, year, refs)
                })
                .collect()
        }
        MarkerStyle::AuthorYearNarrative => {
            let (names, rest) = marker.surface.split_once('(').ok_or(UnresolvedReason::NoMatchingKey)?;
            let year = rest.trim_end_matches(')');
            resolve_author_year(names, year, refs).map(|key| vec![key])
        }
    }
}

/// Expands a numeric marker like `[3,5–7]` into 1-based reference indices.
/// Fails on any index outside `1..=max` or on a descending range.
fn numeric_indices(surface: &str, max: usize) -> Option<Vec<usize>> {
    let inner = surface.strip_prefix('[')?.strip_suffix(']')?;
    let mut indices: Vec<usize> = Vec::new();
    let mut after_range_sep = false;
    for (sep, number) in split_numbers(inner)? {
        let value: usize = number.parse().ok().filter(|v| (1..=max).contains(v))?;
        if after_range_sep {
            let from = *indices.last()?;
            if value < from {
                return None;
            }
            indices.extend(from + 1..=value);
        } else {
            indices.push(value);
        }
        after_range_sep = matches!(sep, Some('-' | '–'));
    }
    Some(indices)
}

/// Splits `3,5–7` into `[(Some(','), "3"), (Some('–'), "5"), (None, "7")]`,
/// pairing each number with the separator that follows it.
fn split_numbers(inner: &str) -> Option<Vec<(Option<char>, &str)>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            ',' | '-' | '–' => {
                let number = inner[start..i].trim();
                if number.is_empty() {
                    return None;
                }
                out.push((Some(c), number));
                start = i + c.len_utf8();
            }
            '0'..='9' | ' ' => {}
            _ => return None,
        }
    }
    let last = inner[start..].trim();
    if last.is_empty() {
        return None;
    }
    out.push((None, last));
    Some(out)
}

fn resolve_numeric(surface: &str, refs: &[ReferenceEntry]) -> Result<Vec<String>, UnresolvedReason> {
    let indices = numeric_indices(surface, refs.len()).ok_or(UnresolvedReason::OutOfRangeIndex)?;
    Ok(indices
        .into_iter()
        .map(|index| {
            // A reference keyed by the number itself wins over list position.
            let label = index.to_string();
            refs.iter().find(|r| r.key == label).unwrap_or(&refs[index - 1]).key.clone()
        })
        .collect())
}

fn resolve_author_year(names: &str, year: &str, refs: &[ReferenceEntry]) -> Result<String, UnresolvedReason> {
    let surname = names.split_whitespace().next().ok_or(UnresolvedReason::NoMatchingKey)?.to_lowercase();
    let year = year.trim();
    let (digits, suffix) = match year.char_indices().last() {
        Some((i, c)) if c.is_ascii_lowercase() => (&year[..i], Some(c)),
        _ => (year, None),
    };
    let year: i32 = digits.parse().map_err(|_| UnresolvedReason::NoMatchingKey)?;

    let mut matches = refs.iter().filter(|r| {
        r.pub_year == Some(year)
            && r.first_author_surname.as_deref().is_some_and(|s| s.to_lowercase() == surname)
            && (suffix.is_none() || r.year_suffix == suffix)
    });
    let first = matches.next().ok_or(UnresolvedReason::NoMatchingKey)?;
    if matches.next().is_some() {
        return Err(UnresolvedReason::AmbiguousMatch);
    }
    Ok(first.key.clone())
}

/// Order-preserving removal of repeated keys; returns the removed keys.
pub(crate) fn dedup_keys(keys: &mut Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut dropped = Vec::new();
    keys.retain(|k| {
        if seen.insert(k.clone()) {
            true
        } else {
            dropped.push(k.clone());
            false
        }
    });
    dropped
}

/// Resolves one marker. Every segment of the marker must resolve, otherwise
/// the whole marker is unresolved with the first failing reason. The
/// returned citation's `sentence_index` is assigned later by extraction.
pub fn resolve_marker(marker: &RawMarker, refs: &[ReferenceEntry]) -> Result<InTextCitation, UnresolvedMarker> {
    match resolve_keys(marker, refs) {
        Ok(mut keys) => {
            dedup_keys(&mut keys);
            Ok(InTextCitation {
                char_start: marker.char_start,
                char_end: marker.char_end,
                reference_keys: keys,
                style: marker.style,
                sentence_index: 0,
            })
        }
        Err(reason) => Err(UnresolvedMarker { marker: marker.clone(), reason }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marker(surface: &str, style: MarkerStyle) -> RawMarker {
        RawMarker { char_start: 0, char_end: surface.chars().count(), surface: surface.into(), style }
    }

    fn numbered(n: usize) -> Vec<ReferenceEntry> {
        (1..=n)
            .map(|i| ReferenceEntry {
                key: i.to_string(),
                raw: format!("ref {i}"),
                cited_id: None,
                first_author_surname: None,
                pub_year: None,
                year_suffix: None,
            })
            .collect()
    }

    fn author(key: &str, surname: &str, year: i32, suffix: Option<char>) -> ReferenceEntry {
        ReferenceEntry {
            key: key.into(),
            raw: format!("{surname} ({year})"),
            cited_id: None,
            first_author_surname: Some(surname.into()),
            pub_year: Some(year),
            year_suffix: suffix,
        }
    }

    #[test]
    fn numeric_range_expansion() {
        let c = resolve_marker(&marker("[3,5–7]", MarkerStyle::NumericBracket), &numbered(10)).unwrap();
        assert_eq!(c.reference_keys, ["3", "5", "6", "7"]);
        let c = resolve_marker(&marker("[1-3, 9]", MarkerStyle::NumericBracket), &numbered(10)).unwrap();
        assert_eq!(c.reference_keys, ["1", "2", "3", "9"]);
    }

    #[test]
    fn numeric_out_of_range() {
        let u = resolve_marker(&marker("[99]", MarkerStyle::NumericBracket), &numbered(10)).unwrap_err();
        assert_eq!(u.reason, UnresolvedReason::OutOfRangeIndex);
        let u = resolve_marker(&marker("[0]", MarkerStyle::NumericBracket), &numbered(10)).unwrap_err();
        assert_eq!(u.reason, UnresolvedReason::OutOfRangeIndex);
        let u = resolve_marker(&marker("[7–5]", MarkerStyle::NumericBracket), &numbered(10)).unwrap_err();
        assert_eq!(u.reason, UnresolvedReason::OutOfRangeIndex);
        let u = resolve_marker(&marker("[1-99999999999999999999]", MarkerStyle::NumericBracket), &numbered(10))
            .unwrap_err();
        assert_eq!(u.reason, UnresolvedReason::OutOfRangeIndex);
    }

    #[test]
    fn duplicate_numeric_keys_collapse() {
        let c = resolve_marker(&marker("[1,1]", MarkerStyle::NumericBracket), &numbered(3)).unwrap();
        assert_eq!(c.reference_keys, ["1"]);
    }

    #[test]
    fn suffix_disambiguates() {
        let refs = vec![author("a", "Smith", 2000, Some('a')), author("b", "Smith", 2000, Some('b'))];
        let c = resolve_marker(&marker("(Smith, 2000a)", MarkerStyle::AuthorYearParenthetical), &refs).unwrap();
        assert_eq!(c.reference_keys, ["a"]);
        let u = resolve_marker(&marker("(Smith, 2000)", MarkerStyle::AuthorYearParenthetical), &refs).unwrap_err();
        assert_eq!(u.reason, UnresolvedReason::AmbiguousMatch);
    }

    #[test]
    fn author_year_lists_and_narratives() {
        let refs = vec![author("s", "Smith", 2003, None), author("l", "lee", 2004, None)];
        let c = resolve_marker(&marker("(Smith et al., 2003; Lee, 2004)", MarkerStyle::AuthorYearParenthetical), &refs)
            .unwrap();
        assert_eq!(c.reference_keys, ["s", "l"]);
        let c = resolve_marker(&marker("Smith et al. (2003)", MarkerStyle::AuthorYearNarrative), &refs).unwrap();
        assert_eq!(c.reference_keys, ["s"]);
    }

    #[test]
    fn one_failing_segment_fails_the_marker() {
        let refs = vec![author("s", "Smith", 2003, None)];
        let u = resolve_marker(&marker("(Smith, 2003; Lee, 2004)", MarkerStyle::AuthorYearParenthetical), &refs)
            .unwrap_err();
        assert_eq!(u.reason, UnresolvedReason::NoMatchingKey);
    }
}
