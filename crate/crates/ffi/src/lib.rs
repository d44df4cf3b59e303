//! C ABI over `citescope`.
//!
//! Every function returns a [`CsStatus`] and writes results through out
//! pointers. Handles (`CsLexicon`, `CsDocument`) are opaque and owned by the
//! caller once returned; release them with the matching `*_free` function.
//! On failure a description is kept per thread and can be read with
//! [`cs_last_error_message`].

use std::cell::RefCell;
use std::collections::HashSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use citescope::location::{progression, tertile, TextPart};
use citescope::model::{CitingDocument, ParsedDocument};
use citescope::parser::extract;
use citescope::pipeline::{analyze_to_dir, AnalysisConfig, AnalyzeRequest};
use citescope::relatedness::{cosine_values, ochiai, CouplingOptions, EmbeddingSpec};
use citescope::sentiment::{bundled_lexicon, score, ValenceLexicon};
use citescope::{Error, GroupBy};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    IoError = 5,
    EmptyAnalysis = 6,
    EmbeddingError = 7,
    IndexOutOfRange = 8,
    Internal = 9,
    Panic = 10,
}

impl From<&Error> for CsStatus {
    fn from(err: &Error) -> Self {
        match err {
            Error::Read { .. } | Error::Write { .. } => CsStatus::IoError,
            Error::Json(_) | Error::Lexicon { .. } | Error::Grammar { .. } => CsStatus::ParseError,
            Error::EmptyAnalysis => CsStatus::EmptyAnalysis,
            Error::Transport { .. } | Error::Provider(_) => CsStatus::EmbeddingError,
            Error::ThreadPool(_) => CsStatus::Internal,
            _ => CsStatus::InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsTextPart {
    Begin = 0,
    Middle = 1,
    End = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsGroupBy {
    Year = 0,
    Age = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsSentiment {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsDocumentCounts {
    /// Characters in the section texts joined by newlines.
    pub body_chars: u64,
    pub references: u64,
    pub citations: u64,
    pub mentions: u64,
    pub citation_sentences: u64,
    pub unresolved_markers: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsAnalyzeOptions {
    pub group_by: CsGroupBy,
    pub min_pairs: u64,
    pub exclude_target_from_coupling: bool,
    /// Worker threads; 0 picks one per core.
    pub jobs: u32,
}

/// Opaque valence lexicon.
pub struct CsLexicon(ValenceLexicon);

/// Opaque parsed citing document.
pub struct CsDocument(ParsedDocument);

struct Failure {
    status: CsStatus,
    message: String,
}

impl Failure {
    fn new(status: CsStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(CsStatus::from(&err), err.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {what}"));
            CsStatus::Panic
        }
    }
}

fn non_null<T>(ptr: *const T, name: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        Err(Failure::new(CsStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `ptr` must be null or a NUL-terminated string.
unsafe fn text<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(ptr, name)?;
    CStr::from_ptr(ptr).to_str().map_err(|e| Failure::new(CsStatus::InvalidUtf8, format!("{name}: {e}")))
}

/// # Safety
/// `ptr` must point to `len` NUL-terminated strings when `len > 0`.
unsafe fn string_set<'a>(ptr: *const *const c_char, len: usize, name: &str) -> Result<HashSet<&'a str>, Failure> {
    if len == 0 {
        return Ok(HashSet::new());
    }
    non_null(ptr, name)?;
    std::slice::from_raw_parts(ptr, len).iter().enumerate().map(|(i, &s)| text(s, &format!("{name}[{i}]"))).collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Copy of the bundled lexicon.
///
/// # Safety
/// `out` must be a valid pointer to write a handle into.
#[no_mangle]
pub unsafe extern "C" fn cs_lexicon_default(out: *mut *mut CsLexicon) -> CsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = Box::into_raw(Box::new(CsLexicon(bundled_lexicon().clone())));
        Ok(())
    })
}

/// Lexicon read from a `token<TAB>valence` file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_lexicon_load(path: *const c_char, out: *mut *mut CsLexicon) -> CsStatus {
    guard(|| {
        non_null(out, "out")?;
        let lexicon = ValenceLexicon::load(text(path, "path")?)?;
        *out = Box::into_raw(Box::new(CsLexicon(lexicon)));
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be null or a handle from `cs_lexicon_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_lexicon_free(lexicon: *mut CsLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Polarity shares and compound score of one sentence.
///
/// # Safety
/// `lexicon` must be a live handle, `sentence` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_sentiment_score(
    lexicon: *const CsLexicon,
    sentence: *const c_char,
    out: *mut CsSentiment,
) -> CsStatus {
    guard(|| {
        non_null(lexicon, "lexicon")?;
        non_null(out, "out")?;
        let s = score(text(sentence, "sentence")?, &(*lexicon).0);
        *out = CsSentiment { pos: s.pos, neu: s.neu, neg: s.neg, compound: s.compound };
        Ok(())
    })
}

/// Parses in-text citations of one citing document given as a JSON object
/// with `id`, `year`, `title`, `abstract`, `sections` and `references`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_document_parse_json(json: *const c_char, out: *mut *mut CsDocument) -> CsStatus {
    guard(|| {
        non_null(out, "out")?;
        let doc: CitingDocument = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(CsDocument(extract(doc))));
        Ok(())
    })
}

/// # Safety
/// `doc` must be null or a handle from `cs_document_parse_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_document_free(doc: *mut CsDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_document_counts(doc: *const CsDocument, out: *mut CsDocumentCounts) -> CsStatus {
    guard(|| {
        non_null(doc, "doc")?;
        non_null(out, "out")?;
        let p = &(*doc).0;
        *out = CsDocumentCounts {
            body_chars: p.body_char_count as u64,
            references: p.doc.references.len() as u64,
            citations: p.citations.len() as u64,
            mentions: p.mentions.len() as u64,
            citation_sentences: p.citation_sentences.len() as u64,
            unresolved_markers: p.unresolved.len() as u64,
        };
        Ok(())
    })
}

/// Text progression of the `index`-th mention, in body order.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_document_mention_progression(
    doc: *const CsDocument,
    index: u64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        non_null(doc, "doc")?;
        non_null(out, "out")?;
        let p = &(*doc).0;
        let mention = usize::try_from(index).ok().and_then(|i| p.mentions.get(i)).ok_or_else(|| {
            Failure::new(CsStatus::IndexOutOfRange, format!("mention {index} of {}", p.mentions.len()))
        })?;
        *out = progression(mention.char_start, p.body_char_count)?;
        Ok(())
    })
}

/// `offset / body_chars`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_progression(offset: u64, body_chars: u64, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = progression(offset as usize, body_chars as usize)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_tertile(progression: f64, out: *mut CsTextPart) -> CsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = match tertile(progression)? {
            TextPart::Begin => CsTextPart::Begin,
            TextPart::Middle => CsTextPart::Middle,
            TextPart::End => CsTextPart::End,
        };
        Ok(())
    })
}

/// Ochiai coefficient of two id sets. Repeated ids count once.
///
/// # Safety
/// `a` and `b` must point to `a_len` and `b_len` NUL-terminated strings;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_ochiai(
    a: *const *const c_char,
    a_len: usize,
    b: *const *const c_char,
    b_len: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ochiai(&string_set(a, a_len, "a")?, &string_set(b, b_len, "b")?)?;
        Ok(())
    })
}

/// Cosine similarity of two `dim`-component vectors.
///
/// # Safety
/// `u` and `v` must each point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_cosine(u: *const f64, v: *const f64, dim: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null(u, "u")?;
        non_null(v, "v")?;
        non_null(out, "out")?;
        if dim == 0 {
            return Err(Failure::new(CsStatus::InvalidArgument, "dim is 0"));
        }
        let (u, v) = (std::slice::from_raw_parts(u, dim), std::slice::from_raw_parts(v, dim));
        *out = cosine_values(u, v)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn cs_analyze_options_default() -> CsAnalyzeOptions {
    CsAnalyzeOptions { group_by: CsGroupBy::Year, min_pairs: 1, exclude_target_from_coupling: true, jobs: 0 }
}

/// Runs the full analysis and writes the CSV tables and `report.json` into
/// `out_dir`. `lexicon_path` may be null for the bundled lexicon;
/// `embeddings` is `test`, `file:PATH` or `url:URL`.
///
/// # Safety
/// String arguments must be NUL-terminated; `options` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_analyze_to_dir(
    corpus_path: *const c_char,
    targets_path: *const c_char,
    lexicon_path: *const c_char,
    embeddings: *const c_char,
    out_dir: *const c_char,
    options: *const CsAnalyzeOptions,
) -> CsStatus {
    guard(|| {
        non_null(options, "options")?;
        let options = *options;
        let lexicon =
            if lexicon_path.is_null() { None } else { Some(PathBuf::from(text(lexicon_path, "lexicon_path")?)) };
        let request = AnalyzeRequest {
            corpus: PathBuf::from(text(corpus_path, "corpus_path")?),
            targets: PathBuf::from(text(targets_path, "targets_path")?),
            lexicon,
            embeddings: text(embeddings, "embeddings")?.parse::<EmbeddingSpec>()?,
            config: AnalysisConfig {
                group_by: match options.group_by {
                    CsGroupBy::Year => GroupBy::Year,
                    CsGroupBy::Age => GroupBy::Age,
                },
                min_pairs: options.min_pairs,
                coupling: CouplingOptions { exclude_target: options.exclude_target_from_coupling },
                jobs: (options.jobs > 0).then_some(options.jobs as usize),
            },
        };
        analyze_to_dir(&request, std::path::Path::new(text(out_dir, "out_dir")?))?;
        Ok(())
    })
}
