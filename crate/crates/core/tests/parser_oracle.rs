mod common;

use std::time::Instant;

use citescope::location::text_progression;
use citescope::model::{CitingDocument, ParsedDocument, ReferenceEntry, Section};
use citescope::parser::extract;
use common::{naive_body, naive_parse, synth_documents, NaiveParse};
use proptest::prelude::*;

fn assert_matches_oracle(parsed: &ParsedDocument, oracle: &NaiveParse) {
    let id = &parsed.doc.id;
    assert_eq!(parsed.body_char_count, oracle.n, "{id}: body length");
    assert_eq!(parsed.citations.len(), oracle.citations.len(), "{id}: citation count\n{}", oracle.body);
    for (c, o) in parsed.citations.iter().zip(&oracle.citations) {
        assert_eq!((c.char_start, c.char_end), (o.start, o.end), "{id}: citation span");
        assert_eq!(c.reference_keys, o.keys, "{id}: keys of citation at {}", o.start);
        assert_eq!(c.sentence_index, o.sentence, "{id}: sentence of citation at {}", o.start);
    }
    let mentions: Vec<(usize, String)> =
        parsed.mentions.iter().map(|m| (m.char_start, m.reference_key.clone())).collect();
    assert_eq!(mentions, oracle.mentions, "{id}: mentions");
    let sentences: Vec<(usize, usize)> = parsed.citation_sentences.iter().map(|s| (s.char_start, s.char_end)).collect();
    assert_eq!(sentences, oracle.sentences, "{id}: citation sentences\n{}", oracle.body);
    let chars: Vec<char> = oracle.body.chars().collect();
    for s in &parsed.citation_sentences {
        assert_eq!(s.text, chars[s.char_start..s.char_end].iter().collect::<String>());
    }
    let unresolved: Vec<usize> = parsed.unresolved.iter().map(|u| u.marker.char_start).collect();
    assert_eq!(unresolved, oracle.unresolved, "{id}: unresolved markers");
}

#[test]
fn generator_documents_match_naive_oracle() {
    let docs = synth_documents(100, 11);
    let started = Instant::now();
    for doc in docs {
        let oracle = naive_parse(&doc);
        assert!(!oracle.citations.is_empty() || doc.sections.iter().all(|s| s.text.is_empty()));
        assert_matches_oracle(&extract(doc), &oracle);
    }
    assert!(started.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn progression_is_offset_over_concatenated_length() {
    for doc in synth_documents(100, 12) {
        let body = naive_body(&doc);
        let n = body.chars().count();
        let parsed = extract(doc);
        for m in &parsed.mentions {
            let expected = m.char_start as f64 / n as f64;
            assert_eq!(text_progression(&parsed, m).unwrap().to_bits(), expected.to_bits());
        }
    }
}

const NAMES: [&str; 6] = ["Smith", "Jones", "Østergaard", "O'Neill", "Lee-Park", "García"];
const WORDS: [&str; 8] = ["results", "the", "model", "Data", "see", "were", "shown", "Table"];

fn fragment(kind: u8, a: u8, b: u8, c: u8) -> String {
    let name = NAMES[a as usize % NAMES.len()];
    let other = NAMES[b as usize % NAMES.len()];
    let year = ["1999", "2001", "2001a", "2001b", "2020"][c as usize % 5];
    let (i, j) = (a % 9, b % 9);
    match kind % 26 {
        0..=5 => WORDS[(a as usize + kind as usize) % WORDS.len()].to_string(),
        6 => ". ".into(),
        7 => ["! ", "? ", "...", ".\"", ".)"][a as usize % 5].into(),
        8 => "\n".into(),
        9 => ["e.g.", "Fig.", "et al.", "cf.", "vs.", "E.G.", "I.e. "][a as usize % 7].into(),
        10 => format!("[{i}]"),
        11 => format!("[{i},{j}]"),
        12 => format!("[{i}, {j}]"),
        13 => format!("[{i}–{j}]"),
        14 => format!("[{i}-{j},{}]", c % 12),
        15 => ["[1,,2]", "[ 1]", "[1,]", "[a]", "[12]"][a as usize % 5].into(),
        16 => format!("({name}, {year})"),
        17 => format!("({name} et al., {year})"),
        18 => format!("({name} and {other}, {year}; {other},{year})"),
        19 => format!("({name} & {other} et al., {year})"),
        20 => format!("{name} ({year})"),
        21 => format!("{name} et al. ({year})"),
        22 => format!("(see {name}, {year})"),
        23 => format!("({name} {year})"),
        24 => format!("{}{name} ({year})", ["x", "_", "3", " "][a as usize % 4]),
        _ => "  ".into(),
    }
}

fn references(spec: &[(u8, u8, bool)]) -> Vec<ReferenceEntry> {
    spec.iter()
        .enumerate()
        .map(|(i, &(n, y, numeric_key))| {
            let (year, suffix) =
                [(1999, None), (2001, None), (2001, Some('a')), (2001, Some('b')), (2020, None)][y as usize % 5];
            ReferenceEntry {
                key: if numeric_key { ((i * 7 + 3) % (spec.len() + 2) + 1).to_string() } else { format!("r{i}") },
                raw: String::new(),
                cited_id: None,
                first_author_surname: Some(NAMES[n as usize % NAMES.len()].to_string()),
                pub_year: Some(year),
                year_suffix: suffix,
            }
        })
        .collect()
}

fn arbitrary_document() -> impl Strategy<Value = CitingDocument> {
    let fragments = prop::collection::vec((any::<u8>(), any::<u8>(), any::<u8>(), any::<u8>(), any::<bool>()), 0..60);
    let sections = prop::collection::vec(fragments, 1..4);
    let refs = prop::collection::vec((any::<u8>(), any::<u8>(), any::<bool>()), 0..10);
    (sections, refs).prop_map(|(sections, refs)| {
        let mut references = references(&refs);
        let mut seen = std::collections::HashSet::new();
        references.retain(|r| seen.insert(r.key.clone()));
        CitingDocument {
            id: "P".into(),
            year: 2020,
            title: String::new(),
            abstract_text: String::new(),
            sections: sections
                .into_iter()
                .map(|frags| Section {
                    label: "S".into(),
                    text: frags
                        .into_iter()
                        .map(|(k, a, b, c, space)| fragment(k, a, b, c) + if space { " " } else { "" })
                        .collect(),
                })
                .collect(),
            references,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn adversarial_documents_match_naive_oracle(doc in arbitrary_document()) {
        let oracle = naive_parse(&doc);
        assert_matches_oracle(&extract(doc), &oracle);
    }

    #[test]
    fn sentences_partition_visible_text(doc in arbitrary_document()) {
        let body = naive_body(&doc);
        let spans = citescope::parser::segment_sentences(&body);
        let chars: Vec<char> = body.chars().collect();
        let mut covered = vec![false; chars.len()];
        let mut last_end = 0;
        for &(a, b) in &spans {
            prop_assert!(a >= last_end && a < b);
            prop_assert!(!chars[a].is_whitespace() && !chars[b - 1].is_whitespace());
            prop_assert!(!chars[a..b].contains(&'\n'));
            covered[a..b].iter_mut().for_each(|c| *c = true);
            last_end = b;
        }
        for (c, cov) in chars.iter().zip(covered) {
            prop_assert!(cov || c.is_whitespace());
        }
    }

    #[test]
    fn targets_tally_is_ordered(doc in arbitrary_document()) {
        let mut doc = doc;
        for (i, r) in doc.references.iter_mut().enumerate() {
            r.cited_id = Some(if i % 2 == 0 { "T1".to_string() } else { format!("W{i}") });
        }
        let targets = [("T1".to_string(), citescope::TargetPaper {
            id: "T1".into(), year: 1999, title: String::new(), abstract_text: String::new(), reference_ids: vec![],
        })].into_iter().collect();
        let parsed = extract(doc);
        let (all, t) = citescope::parser::tally([&parsed], &targets);
        prop_assert!(all.is_ordered() && t.is_ordered());
        prop_assert!(t.reference_mentions <= all.reference_mentions);
    }
}

#[test]
fn adversarial_strategy_covers_every_marker_form() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    use std::collections::BTreeMap;

    let mut runner = TestRunner::deterministic();
    let mut styles: BTreeMap<String, usize> = BTreeMap::new();
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    let mut multi_sentence = 0;
    for _ in 0..300 {
        let doc = arbitrary_document().new_tree(&mut runner).unwrap().current();
        let parsed = extract(doc);
        for c in &parsed.citations {
            *styles.entry(c.style.name().to_string()).or_default() += 1;
        }
        for u in &parsed.unresolved {
            *reasons.entry(format!("{:?}", u.reason)).or_default() += 1;
        }
        multi_sentence += usize::from(parsed.citation_sentences.len() > 1);
    }
    assert_eq!(styles.len(), 3, "{styles:?}");
    assert_eq!(reasons.len(), 3, "{reasons:?}");
    assert!(multi_sentence > 30);
}
