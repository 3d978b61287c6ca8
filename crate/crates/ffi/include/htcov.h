#ifndef HTCOV_H
#define HTCOV_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum HtcovStatus {
  HTCOV_STATUS_OK = 0,
  HTCOV_STATUS_NULL_POINTER = 1,
  HTCOV_STATUS_INVALID_UTF8 = 2,
  HTCOV_STATUS_PARAMETER = 3,
  HTCOV_STATUS_CONTRACT = 4,
  HTCOV_STATUS_NUMERIC = 5,
  HTCOV_STATUS_SEARCH_FAILURE = 6,
  HTCOV_STATUS_JSON = 7,
  HTCOV_STATUS_INTERNAL = 8,
} HtcovStatus;

// Opaque sample-matrix handle.
typedef struct HtcovSampleMatrix HtcovSampleMatrix;

// Flat deviation report (identity target).
typedef struct HtcovDeviationReport {
  size_t n;
  size_t big_n;
  uint64_t seed;
  double deviation;
  double s_min;
  double s_max;
  double max_norm_sq;
} HtcovDeviationReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *htcov_version(void);

// Message for the most recent error on this thread; empty when none.
// The pointer stays valid until the next failing call on the same thread.
const char *htcov_last_error_message(void);

// Build a sample matrix from a JSON distribution spec
// (`{"family": ..., "params": {...}, "n": ...}`).
//
// # Safety
// `spec_json` must be a valid NUL-terminated string and `out` a valid
// pointer; on success `*out` owns the handle and must be released with
// [`htcov_sample_matrix_free`].
enum HtcovStatus htcov_sample_matrix_new(const char *spec_json,
                                         size_t n,
                                         size_t big_n,
                                         uint64_t seed,
                                         struct HtcovSampleMatrix **out);

// Release a handle returned by [`htcov_sample_matrix_new`]; NULL is a no-op.
//
// # Safety
// `m` must be a pointer previously returned by this library and not yet
// freed.
void htcov_sample_matrix_free(struct HtcovSampleMatrix *m);

// Matrix dimensions (rows = N, cols = n).
//
// # Safety
// All pointers must be valid.
enum HtcovStatus htcov_sample_matrix_dims(const struct HtcovSampleMatrix *m,
                                          size_t *rows,
                                          size_t *cols);

// Copy the matrix into `buf` in row-major order; `len` must be exactly
// rows * cols.
//
// # Safety
// `buf` must point to at least `len` writable doubles.
enum HtcovStatus htcov_sample_matrix_copy_rows(const struct HtcovSampleMatrix *m,
                                               double *buf,
                                               size_t len);

// Deviation of the sample covariance from the identity, with extreme
// singular values and the largest squared row norm.
//
// # Safety
// All pointers must be valid.
enum HtcovStatus htcov_deviation_report(const struct HtcovSampleMatrix *m,
                                        struct HtcovDeviationReport *out);

// Number of classes used by the greedy sample coloring at threshold `h`.
//
// # Safety
// All pointers must be valid.
enum HtcovStatus htcov_greedy_color_count(const struct HtcovSampleMatrix *m, double h, size_t *out);

// The threshold choice (B N)^{1/p} n^{1/2 - 1/p} / ln(n).
//
// # Safety
// `out` must be a valid pointer.
enum HtcovStatus htcov_default_threshold(double b, size_t big_n, size_t n, double p, double *out);

// Chromatic tail bound (B N H^{-p})^m n^{p/2}, raw and clamped to [0, 1].
//
// # Safety
// `raw` and `clamped` must be valid pointers.
enum HtcovStatus htcov_chromatic_tail_bound(double b,
                                            size_t big_n,
                                            double h,
                                            double p,
                                            size_t n,
                                            size_t m,
                                            double *raw,
                                            double *clamped);

// Least-squares slope of log y against log x.
//
// # Safety
// `xs` and `ys` must point to `len` readable doubles; the three outputs
// must be valid pointers.
enum HtcovStatus htcov_fit_exponent(const double *xs,
                                    const double *ys,
                                    size_t len,
                                    double *alpha,
                                    double *intercept,
                                    double *r_squared);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HTCOV_H */
