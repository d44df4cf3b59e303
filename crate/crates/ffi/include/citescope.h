#ifndef CITESCOPE_H
#define CITESCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_UTF8 = 2,
  CS_STATUS_INVALID_ARGUMENT = 3,
  CS_STATUS_PARSE_ERROR = 4,
  CS_STATUS_IO_ERROR = 5,
  CS_STATUS_EMPTY_ANALYSIS = 6,
  CS_STATUS_EMBEDDING_ERROR = 7,
  CS_STATUS_INDEX_OUT_OF_RANGE = 8,
  CS_STATUS_INTERNAL = 9,
  CS_STATUS_PANIC = 10,
} CsStatus;

typedef enum CsTextPart {
  CS_TEXT_PART_BEGIN = 0,
  CS_TEXT_PART_MIDDLE = 1,
  CS_TEXT_PART_END = 2,
} CsTextPart;

typedef enum CsGroupBy {
  CS_GROUP_BY_YEAR = 0,
  CS_GROUP_BY_AGE = 1,
} CsGroupBy;

/**
 * Opaque parsed citing document.
 */
typedef struct CsDocument CsDocument;

/**
 * Opaque valence lexicon.
 */
typedef struct CsLexicon CsLexicon;

typedef struct CsSentiment {
  double pos;
  double neu;
  double neg;
  double compound;
} CsSentiment;

typedef struct CsDocumentCounts {
  /**
   * Characters in the section texts joined by newlines.
   */
  uint64_t body_chars;
  uint64_t references;
  uint64_t citations;
  uint64_t mentions;
  uint64_t citation_sentences;
  uint64_t unresolved_markers;
} CsDocumentCounts;

typedef struct CsAnalyzeOptions {
  enum CsGroupBy group_by;
  uint64_t min_pairs;
  bool exclude_target_from_coupling;
  /**
   * Worker threads; 0 picks one per core.
   */
  uint32_t jobs;
} CsAnalyzeOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cs_last_error_message(void);

/**
 * Copy of the bundled lexicon.
 *
 * # Safety
 * `out` must be a valid pointer to write a handle into.
 */
enum CsStatus cs_lexicon_default(struct CsLexicon **out);

/**
 * Lexicon read from a `token<TAB>valence` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CsStatus cs_lexicon_load(const char *path, struct CsLexicon **out);

/**
 * # Safety
 * `lexicon` must be null or a handle from `cs_lexicon_*` not yet freed.
 */
void cs_lexicon_free(struct CsLexicon *lexicon);

/**
 * Polarity shares and compound score of one sentence.
 *
 * # Safety
 * `lexicon` must be a live handle, `sentence` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum CsStatus cs_sentiment_score(const struct CsLexicon *lexicon,
                                 const char *sentence,
                                 struct CsSentiment *out);

/**
 * Parses in-text citations of one citing document given as a JSON object
 * with `id`, `year`, `title`, `abstract`, `sections` and `references`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CsStatus cs_document_parse_json(const char *json, struct CsDocument **out);

/**
 * # Safety
 * `doc` must be null or a handle from `cs_document_parse_json` not yet freed.
 */
void cs_document_free(struct CsDocument *doc);

/**
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum CsStatus cs_document_counts(const struct CsDocument *doc, struct CsDocumentCounts *out);

/**
 * Text progression of the `index`-th mention, in body order.
 *
 * # Safety
 * `doc` must be a live handle and `out` a valid pointer.
 */
enum CsStatus cs_document_mention_progression(const struct CsDocument *doc,
                                              uint64_t index,
                                              double *out);

/**
 * `offset / body_chars`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CsStatus cs_progression(uint64_t offset, uint64_t body_chars, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum CsStatus cs_tertile(double progression, enum CsTextPart *out);

/**
 * Ochiai coefficient of two id sets. Repeated ids count once.
 *
 * # Safety
 * `a` and `b` must point to `a_len` and `b_len` NUL-terminated strings;
 * `out` must be a valid pointer.
 */
enum CsStatus cs_ochiai(const char *const *a,
                        size_t a_len,
                        const char *const *b,
                        size_t b_len,
                        double *out);

/**
 * Cosine similarity of two `dim`-component vectors.
 *
 * # Safety
 * `u` and `v` must each point to `dim` doubles; `out` must be valid.
 */
enum CsStatus cs_cosine(const double *u, const double *v, size_t dim, double *out);

struct CsAnalyzeOptions cs_analyze_options_default(void);

/**
 * Runs the full analysis and writes the CSV tables and `report.json` into
 * `out_dir`. `lexicon_path` may be null for the bundled lexicon;
 * `embeddings` is `test`, `file:PATH` or `url:URL`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `options` must be valid.
 */
enum CsStatus cs_analyze_to_dir(const char *corpus_path,
                                const char *targets_path,
                                const char *lexicon_path,
                                const char *embeddings,
                                const char *out_dir,
                                const struct CsAnalyzeOptions *options);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CITESCOPE_H */
