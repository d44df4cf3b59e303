//! Citation parsing: marker scanning, resolution, sentence segmentation and
//! assembly of [`ParsedDocument`]s.

mod grammar;
mod resolve;
mod sentences;
mod tally;

use std::sync::LazyLock;

pub use grammar::{MarkerGrammar, DEFAULT_GRAMMAR_TABLE};
pub use resolve::resolve_marker;
pub use sentences::{Abbreviations, DEFAULT_ABBREVIATIONS};
pub use tally::{tally, CorpusStats, StatsScope, Tally};

use crate::model::{
    CitationSentence, CitingDocument, InTextCitation, ParseWarning, ParsedDocument, RawMarker, ReferenceMention,
    UnresolvedMarker,
};

/// Marker grammar plus abbreviation list; immutable and shareable.
#[derive(Debug, Clone, Default)]
pub struct CitationParser {
    grammar: MarkerGrammar,
    abbreviations: Abbreviations,
}

static DEFAULT_PARSER: LazyLock<CitationParser> = LazyLock::new(CitationParser::default);

impl CitationParser {
    pub fn new(grammar: MarkerGrammar, abbreviations: Abbreviations) -> Self {
        CitationParser { grammar, abbreviations }
    }

    /// Shared parser built from the bundled grammar and abbreviation list.
    pub fn shared() -> &'static CitationParser {
        &DEFAULT_PARSER
    }

    pub fn scan_markers(&self, text: &str) -> Vec<RawMarker> {
        self.grammar.scan(text)
    }

    /// Sentence spans `[start, end)` in character offsets.
    pub fn segment_sentences(&self, text: &str) -> Vec<(usize, usize)> {
        let chars: Vec<char> = text.chars().collect();
        let markers = self.grammar.scan(text);
        sentences::segment_chars(&chars, &markers, &self.abbreviations)
    }

    pub fn extract(&self, doc: CitingDocument) -> ParsedDocument {
        let body = doc.body();
        let chars: Vec<char> = body.chars().collect();
        let markers = self.grammar.scan(&body);
        let spans = sentences::segment_chars(&chars, &markers, &self.abbreviations);

        let mut citations: Vec<InTextCitation> = Vec::new();
        let mut unresolved: Vec<UnresolvedMarker> = Vec::new();
        let mut warnings = Vec::new();
        // Span index per citation, translated to citation-sentence indices below.
        let mut host_spans: Vec<usize> = Vec::new();
        for marker in markers {
            match resolve::resolve_keys(&marker, &doc.references) {
                Ok(mut keys) => {
                    for dropped in resolve::dedup_keys(&mut keys) {
                        warnings.push(ParseWarning {
                            char_start: marker.char_start,
                            message: format!("reference {dropped:?} repeated in marker {:?}", marker.surface),
                        });
                    }
                    let host = spans.partition_point(|&(_, end)| end <= marker.char_start);
                    debug_assert!(host < spans.len() && spans[host].0 <= marker.char_start);
                    host_spans.push(host);
                    citations.push(InTextCitation {
                        char_start: marker.char_start,
                        char_end: marker.char_end,
                        reference_keys: keys,
                        style: marker.style,
                        sentence_index: 0,
                    });
                }
                Err(reason) => unresolved.push(UnresolvedMarker { marker, reason }),
            }
        }

        let mut citation_sentences: Vec<CitationSentence> = Vec::new();
        let mut last_host = None;
        for (citation, host) in citations.iter_mut().zip(host_spans) {
            if last_host != Some(host) {
                let (start, end) = spans[host];
                citation_sentences.push(CitationSentence {
                    char_start: start,
                    char_end: end,
                    text: chars[start..end].iter().collect(),
                });
                last_host = Some(host);
            }
            citation.sentence_index = citation_sentences.len() - 1;
        }

        let mentions = citations
            .iter()
            .enumerate()
            .flat_map(|(index, c)| {
                c.reference_keys.iter().map(move |key| ReferenceMention {
                    citation_index: index,
                    reference_key: key.clone(),
                    char_start: c.char_start,
                })
            })
            .collect();

        ParsedDocument {
            body_char_count: chars.len(),
            doc,
            citations,
            mentions,
            citation_sentences,
            unresolved,
            warnings,
        }
    }
}

pub fn scan_markers(text: &str) -> Vec<RawMarker> {
    CitationParser::shared().scan_markers(text)
}

pub fn segment_sentences(text: &str) -> Vec<(usize, usize)> {
    CitationParser::shared().segment_sentences(text)
}

pub fn extract(doc: CitingDocument) -> ParsedDocument {
    CitationParser::shared().extract(doc)
}
