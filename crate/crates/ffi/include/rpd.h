#ifndef RPD_H
#define RPD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RpdStatus {
  RPD_STATUS_OK = 0,
  RPD_STATUS_NULL_ARGUMENT = 1,
  RPD_STATUS_INVALID_UTF8 = 2,
  RPD_STATUS_PARSE_ERROR = 3,
  RPD_STATUS_INVALID_ARGUMENT = 4,
  RPD_STATUS_DATA_MISMATCH = 5,
  RPD_STATUS_PANIC = 6,
} RpdStatus;

/**
 * Opaque corpus handle.
 */
typedef struct RpdCorpus RpdCorpus;

typedef struct RpdScores {
  double m;
  double size_g;
  double size_h;
  double precision;
  double recall;
  double f1;
} RpdScores;

typedef struct RpdWelch {
  double t;
  double df;
  double p;
} RpdWelch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *rpd_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void rpd_string_free(char *s);

/**
 * Parses a canonical corpus. On success `*out` receives a handle to be
 * released with [`rpd_corpus_free`].
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RpdStatus rpd_corpus_from_json(const char *json, struct RpdCorpus **out);

/**
 * # Safety
 * `corpus` must be NULL or a handle from [`rpd_corpus_from_json`], not yet
 * freed.
 */
void rpd_corpus_free(struct RpdCorpus *corpus);

/**
 * Number of documents, or 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
size_t rpd_corpus_len(const struct RpdCorpus *corpus);

/**
 * Micro-averaged scores of one metric (`"epm"`, `"mpbm"`, `"mbawo"` or
 * `"mwo"`). The hypothesis is the reference layer of `hypothesis` when it
 * is not NULL, otherwise the layer of `gold` named `layer`.
 *
 * # Safety
 * Handles must be live; strings NULL or NUL-terminated; `out` valid.
 */
enum RpdStatus rpd_evaluate(const struct RpdCorpus *gold,
                            const struct RpdCorpus *hypothesis,
                            const char *layer,
                            const char *metric,
                            struct RpdScores *out);

/**
 * Maximum-weight matching of a row-major `rows` x `cols` matrix with at
 * least `min_positive` strictly positive pairs. `col_of_row` (length
 * `rows`, may be NULL) receives each row's column or -1. When the
 * constraint cannot be met the total is 0 and every row is -1.
 *
 * # Safety
 * `weights` must hold `rows * cols` values; `total` must be valid.
 */
enum RpdStatus rpd_max_weight_matching(const double *weights,
                                       size_t rows,
                                       size_t cols,
                                       size_t min_positive,
                                       double *total,
                                       ptrdiff_t *col_of_row);

/**
 * Welch's unequal-variance t-test.
 *
 * # Safety
 * `a` and `b` must hold `a_len` and `b_len` values; `out` must be valid.
 */
enum RpdStatus rpd_welch(const double *a,
                         size_t a_len,
                         const double *b,
                         size_t b_len,
                         struct RpdWelch *out);

/**
 * Encodes the reference layer, or the layer named `layer` when it is not
 * NULL, as tag TSV under `scheme` (for example `"BIOMJ-Token"`).
 *
 * # Safety
 * `corpus` must be live; strings NULL or NUL-terminated; `out` valid.
 */
enum RpdStatus rpd_encode_tsv(const struct RpdCorpus *corpus,
                              const char *scheme,
                              const char *layer,
                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RPD_H */
