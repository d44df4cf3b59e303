//! Independent reference implementations used as test oracles. They favour
//! obviousness over speed: markers are matched by hand-written recursive
//! descent, sentences by explicit cut points, aggregates by plain loops.

#![allow(dead_code)]

use std::collections::BTreeMap;

use citescope::model::{CitingDocument, ReferenceEntry};
use citescope::synth::{self, Scenario, Schedule};

pub const ABBREVIATIONS: [&str; 6] = ["et al.", "e.g.", "i.e.", "fig.", "cf.", "vs."];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveMarker {
    pub start: usize,
    pub end: usize,
    pub style: &'static str,
    pub surface: String,
}

fn lit(cs: &[char], i: usize, s: &str) -> Option<usize> {
    let mut j = i;
    for c in s.chars() {
        if cs.get(j) != Some(&c) {
            return None;
        }
        j += 1;
    }
    Some(j)
}

fn name(cs: &[char], i: usize) -> Option<usize> {
    if !cs.get(i)?.is_uppercase() {
        return None;
    }
    let mut j = i + 1;
    while cs.get(j).is_some_and(|&c| c.is_alphabetic() || c == '\'' || c == '’' || c == '-') {
        j += 1;
    }
    Some(j)
}

fn year(cs: &[char], i: usize) -> Option<usize> {
    let d: Vec<char> = cs.get(i..i + 4)?.to_vec();
    if !d.iter().all(char::is_ascii_digit) {
        return None;
    }
    let century: String = d[..2].iter().collect();
    if !["18", "19", "20"].contains(&century.as_str()) {
        return None;
    }
    let j = i + 4;
    Some(if cs.get(j).is_some_and(char::is_ascii_lowercase) { j + 1 } else { j })
}

fn digits(cs: &[char], i: usize) -> Option<usize> {
    let mut j = i;
    while cs.get(j).is_some_and(char::is_ascii_digit) {
        j += 1;
    }
    (j > i).then_some(j)
}

fn numeric(cs: &[char], i: usize) -> Option<usize> {
    let mut j = digits(cs, lit(cs, i, "[")?)?;
    loop {
        let after_sep = match cs.get(j) {
            Some(',') if cs.get(j + 1) == Some(&' ') && cs.get(j + 2).is_some_and(char::is_ascii_digit) => j + 2,
            Some(',' | '-' | '–') => j + 1,
            _ => break,
        };
        match digits(cs, after_sep) {
            Some(k) => j = k,
            None => break,
        }
    }
    lit(cs, j, "]")
}

fn et_al(cs: &[char], i: usize) -> usize {
    lit(cs, i, " et al.").unwrap_or(i)
}

fn segment(cs: &[char], i: usize) -> Option<usize> {
    let mut j = name(cs, i)?;
    'names: loop {
        for sep in [" and ", " & ", " "] {
            if let Some(k) = lit(cs, j, sep).and_then(|k| name(cs, k)) {
                j = k;
                continue 'names;
            }
        }
        break;
    }
    j = et_al(cs, j);
    j = lit(cs, j, ",")?;
    if cs.get(j) == Some(&' ') && year(cs, j).is_none() {
        j += 1;
    }
    year(cs, j)
}

fn parenthetical(cs: &[char], i: usize) -> Option<usize> {
    let mut j = segment(cs, lit(cs, i, "(")?)?;
    while let Some(k) = lit(cs, j, ";") {
        let k = if cs.get(k) == Some(&' ') && segment(cs, k).is_none() { k + 1 } else { k };
        match segment(cs, k) {
            Some(e) => j = e,
            None => break,
        }
    }
    lit(cs, j, ")")
}

fn narrative(cs: &[char], i: usize) -> Option<usize> {
    if i > 0 && (cs[i - 1].is_alphanumeric() || cs[i - 1] == '_') {
        return None;
    }
    let j = et_al(cs, name(cs, i)?);
    let j = year(cs, lit(cs, j, " (")?)?;
    lit(cs, j, ")")
}

/// Left-to-right scan taking the longest marker at the first position where
/// any form matches.
pub fn naive_markers(text: &str) -> Vec<NaiveMarker> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let candidates = [
            (numeric(&cs, i), "numeric-bracket"),
            (parenthetical(&cs, i), "author-year-parenthetical"),
            (narrative(&cs, i), "author-year-narrative"),
        ];
        let best = candidates.iter().filter_map(|(e, s)| e.map(|e| (e, *s))).max_by_key(|(e, _)| *e);
        match best {
            Some((end, style)) => {
                out.push(NaiveMarker { start: i, end, style, surface: cs[i..end].iter().collect() });
                i = end;
            }
            None => i += 1,
        }
    }
    out
}

fn ends_with_abbreviation(cs: &[char], i: usize) -> bool {
    ABBREVIATIONS.iter().any(|abbr| {
        let a: Vec<char> = abbr.chars().collect();
        if a.len() > i + 1 {
            return false;
        }
        let start = i + 1 - a.len();
        let window: String = cs[start..=i].iter().collect::<String>().to_lowercase();
        window == *abbr && (start == 0 || !cs[start - 1].is_alphanumeric())
    })
}

/// Sentence spans: cut after qualifying terminators and around line
/// breaks, then trim each piece.
pub fn naive_sentences(text: &str, markers: &[NaiveMarker]) -> Vec<(usize, usize)> {
    let cs: Vec<char> = text.chars().collect();
    let inside = |i: usize| markers.iter().any(|m| m.start <= i && i < m.end);
    let mut cuts = vec![0];
    for (i, &c) in cs.iter().enumerate() {
        if c == '\n' {
            cuts.push(i);
            cuts.push(i + 1);
        } else if ".!?".contains(c)
            && !inside(i)
            && cs.get(i + 1).is_none_or(|n| n.is_whitespace())
            && !(c == '.' && ends_with_abbreviation(&cs, i))
        {
            cuts.push(i + 1);
        }
    }
    cuts.push(cs.len());
    let mut spans = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        while a < b && cs[a].is_whitespace() {
            a += 1;
        }
        while b > a && cs[b - 1].is_whitespace() {
            b -= 1;
        }
        if a < b {
            spans.push((a, b));
        }
    }
    spans
}

fn numeric_keys(surface: &str, refs: &[ReferenceEntry]) -> Option<Vec<String>> {
    let inner: String = surface[1..surface.len() - 1].replace('–', "-").replace(' ', "");
    let mut indices = Vec::new();
    for item in inner.split(',') {
        let numbers: Vec<usize> = item.split('-').map(|n| n.parse().ok()).collect::<Option<_>>()?;
        if numbers.iter().any(|&n| n == 0 || n > refs.len()) {
            return None;
        }
        indices.push(numbers[0]);
        for pair in numbers.windows(2) {
            if pair[1] < pair[0] {
                return None;
            }
            indices.extend(pair[0] + 1..=pair[1]);
        }
    }
    Some(
        indices
            .into_iter()
            .map(|k| refs.iter().find(|r| r.key == k.to_string()).unwrap_or(&refs[k - 1]).key.clone())
            .collect(),
    )
}

fn author_year_key(names: &str, year: &str, refs: &[ReferenceEntry]) -> Option<String> {
    let surname = names.split_whitespace().next()?.to_lowercase();
    let year = year.trim();
    let (y, suffix) = if year.len() == 5 { (&year[..4], year.chars().last()) } else { (year, None) };
    let y: i32 = y.parse().ok()?;
    let hits: Vec<&ReferenceEntry> = refs
        .iter()
        .filter(|r| {
            r.pub_year == Some(y)
                && r.first_author_surname.as_ref().map(|s| s.to_lowercase()) == Some(surname.clone())
                && (suffix.is_none() || r.year_suffix == suffix)
        })
        .collect();
    (hits.len() == 1).then(|| hits[0].key.clone())
}

/// Reference keys of a marker in marker order with repeats removed, or
/// `None` when any part of it fails to resolve.
pub fn naive_resolve(marker: &NaiveMarker, refs: &[ReferenceEntry]) -> Option<Vec<String>> {
    let keys = match marker.style {
        "numeric-bracket" => numeric_keys(&marker.surface, refs)?,
        "author-year-parenthetical" => {
            let inner = &marker.surface[1..marker.surface.len() - 1];
            inner
                .split(';')
                .map(|seg| {
                    let comma = seg.rfind(',')?;
                    author_year_key(&seg[..comma], &seg[comma + 1..], refs)
                })
                .collect::<Option<Vec<_>>>()?
        }
        _ => {
            let open = marker.surface.find(" (")?;
            let year = &marker.surface[open + 2..marker.surface.len() - 1];
            vec![author_year_key(&marker.surface[..open], year, refs)?]
        }
    };
    let mut unique = Vec::new();
    for k in keys {
        if !unique.contains(&k) {
            unique.push(k);
        }
    }
    Some(unique)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveCitation {
    pub start: usize,
    pub end: usize,
    pub keys: Vec<String>,
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveParse {
    pub body: String,
    pub n: usize,
    pub citations: Vec<NaiveCitation>,
    /// (char offset, key) per mention.
    pub mentions: Vec<(usize, String)>,
    pub sentences: Vec<(usize, usize)>,
    pub unresolved: Vec<usize>,
}

pub fn naive_body(doc: &CitingDocument) -> String {
    let mut body = String::new();
    for (i, s) in doc.sections.iter().enumerate() {
        if i > 0 {
            body += "\n";
        }
        body += &s.text;
    }
    body
}

pub fn naive_parse(doc: &CitingDocument) -> NaiveParse {
    let body = naive_body(doc);
    let markers = naive_markers(&body);
    let spans = naive_sentences(&body, &markers);
    let mut citations = Vec::new();
    let mut unresolved = Vec::new();
    let mut sentences: Vec<(usize, usize)> = Vec::new();
    for m in &markers {
        match naive_resolve(m, &doc.references) {
            Some(keys) => {
                let span =
                    *spans.iter().find(|(a, b)| *a <= m.start && m.start < *b).expect("marker inside a sentence");
                if sentences.last() != Some(&span) {
                    sentences.push(span);
                }
                citations.push(NaiveCitation { start: m.start, end: m.end, keys, sentence: sentences.len() - 1 });
            }
            None => unresolved.push(m.start),
        }
    }
    let mentions = citations.iter().flat_map(|c| c.keys.iter().map(move |k| (c.start, k.clone()))).collect();
    NaiveParse { n: body.chars().count(), body, citations, mentions, sentences, unresolved }
}

/// Synthetic corpus with `per_year` documents in each of 17 years and the
/// location drift, MMR and MRC schedules of the trend scenario.
pub fn trend_scenario(per_year: f64) -> Scenario {
    Scenario {
        seed: 2016,
        start_year: 2000,
        end_year: 2016,
        docs_per_year: Schedule::Constant(per_year),
        body_chars: 2000,
        location_mean: Schedule::Linear { from: 0.49, to: 0.40 },
        mmr_share: Schedule::Linear { from: 0.37, to: 0.25 },
        mrc_share: Schedule::Linear { from: 0.327, to: 0.457 },
        ..Scenario::default()
    }
}

pub fn synth_documents(n: usize, seed: u64) -> Vec<CitingDocument> {
    let scenario = Scenario {
        seed,
        start_year: 2010,
        end_year: 2010,
        docs_per_year: Schedule::Constant(n as f64),
        author_year_share: 0.5,
        ..Scenario::default()
    };
    synth::generate(&scenario).unwrap().documents
}

pub fn demo_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo")
}

/// Plain arithmetic mean; `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Groups values by key, preserving insertion order within a group.
pub fn group<T>(items: impl IntoIterator<Item = (i32, T)>) -> BTreeMap<i32, Vec<T>> {
    let mut out: BTreeMap<i32, Vec<T>> = BTreeMap::new();
    for (k, v) in items {
        out.entry(k).or_default().push(v);
    }
    out
}
