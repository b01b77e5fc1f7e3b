#ifndef EQUIMAX_H
#define EQUIMAX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EquimaxStatus {
  EQUIMAX_STATUS_OK = 0,
  EQUIMAX_STATUS_NULL_POINTER = 1,
  EQUIMAX_STATUS_INVALID_UTF8 = 2,
  EQUIMAX_STATUS_DOMAIN = 3,
  EQUIMAX_STATUS_NUMERIC = 4,
  EQUIMAX_STATUS_INGESTION = 5,
  EQUIMAX_STATUS_INVALID_MODEL = 6,
  EQUIMAX_STATUS_IO = 7,
  EQUIMAX_STATUS_BUFFER_TOO_SMALL = 8,
  EQUIMAX_STATUS_PANIC = 9,
} EquimaxStatus;

typedef struct EquimaxCurve EquimaxCurve;

typedef struct EquimaxModel EquimaxModel;

typedef struct EquimaxTestReport EquimaxTestReport;

// Flat copy of a test report's numeric fields.
typedef struct EquimaxTestSummary {
  size_t n;
  size_t m1;
  size_t m2;
  double ks_statistic;
  double p_value;
  double alpha;
  bool reject;
  size_t permutations;
  uint64_t seed;
} EquimaxTestSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, NUL-terminated engine version. Do not free.
const char *equimax_version(void);

// Copy of the last error message on this thread, or NULL if none.
// Free with `equimax_string_free`.
char *equimax_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void equimax_string_free(char *s);

// `H_{n,i}(x)` for a rational `x` given as `"p/q"`, written to `*out`.
//
// # Safety
// `x` must be a NUL-terminated string; `out` must be writable.
enum EquimaxStatus equimax_hni(uint64_t n, uint64_t i, const char *x, char **out);

// Checks the `H_{n,i}` closed form for all `n <= n_max` at `len` points.
//
// # Safety
// `xs` must point to `len` NUL-terminated strings; `passed` must be writable.
enum EquimaxStatus equimax_verify_ruiz(uint64_t n_max,
                                       const char *const *xs,
                                       size_t len,
                                       bool *passed);

// Signed discrepancy of the `(m, k)` power-sum identity, as `"p/q"`.
//
// # Safety
// `out` must be writable.
enum EquimaxStatus equimax_power_sum_discrepancy(uint64_t m, uint64_t k, char **out);

// Signed discrepancy of the key identity at `n >= 3`, as `"p/q"`.
//
// # Safety
// `out` must be writable.
enum EquimaxStatus equimax_key_identity_discrepancy(uint64_t n, char **out);

// Series check of the convolution identity for `Exp(lambda)`;
// `*mismatch_index` is -1 when every coefficient through `order` agrees.
//
// # Safety
// `lambda` must be a NUL-terminated string; `mismatch_index` writable.
enum EquimaxStatus equimax_convolution_check_exponential(const char *lambda,
                                                         uint64_t n,
                                                         size_t order,
                                                         int64_t *mismatch_index);

// Parses a model string such as `"weibull:shape=2,scale=1"`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum EquimaxStatus equimax_model_parse(const char *spec, struct EquimaxModel **out);

// # Safety
// `model` must be NULL or a handle from `equimax_model_parse`, not yet freed.
void equimax_model_free(struct EquimaxModel *model);

// Canonical model string. Free with `equimax_string_free`.
//
// # Safety
// `model` must be a live handle; `out` writable.
enum EquimaxStatus equimax_model_to_string(const struct EquimaxModel *model, char **out);

// # Safety
// `model` must be a live handle; `pdf` and `cdf` writable.
enum EquimaxStatus equimax_model_evaluate(const struct EquimaxModel *model,
                                          double x,
                                          double *pdf,
                                          double *cdf);

// Fills `out[0..count]` with seeded draws.
//
// # Safety
// `model` must be a live handle; `out` must have room for `count` doubles.
enum EquimaxStatus equimax_model_sample(const struct EquimaxModel *model,
                                        size_t count,
                                        uint64_t seed,
                                        double *out);

// # Safety
// `model` must be a live handle; `out` writable.
enum EquimaxStatus equimax_curve_new(const struct EquimaxModel *model,
                                     uint32_t n,
                                     double x_max,
                                     size_t grid_points,
                                     double tol,
                                     struct EquimaxCurve **out);

// # Safety
// `curve` must be NULL or a live handle.
void equimax_curve_free(struct EquimaxCurve *curve);

// Number of grid points; 0 for a NULL handle.
//
// # Safety
// `curve` must be NULL or a live handle.
size_t equimax_curve_len(const struct EquimaxCurve *curve);

// Largest `|lhs - rhs|` on the grid; NaN for a NULL handle.
//
// # Safety
// `curve` must be NULL or a live handle.
double equimax_curve_max_abs_discrepancy(const struct EquimaxCurve *curve);

// Copies grid, left and right cdf values into caller buffers of `capacity`
// doubles each. Any of the three may be NULL to skip it.
//
// # Safety
// `curve` must be a live handle; non-NULL buffers must hold `capacity` doubles.
enum EquimaxStatus equimax_curve_copy(const struct EquimaxCurve *curve,
                                      double *grid,
                                      double *lhs_cdf,
                                      double *rhs_cdf,
                                      size_t capacity);

// The curve as CSV (`x,lhs_cdf,rhs_cdf,discrepancy`).
//
// # Safety
// `curve` must be a live handle; `out` writable.
enum EquimaxStatus equimax_curve_to_csv(const struct EquimaxCurve *curve, char **out);

// Two-sample KS distance.
//
// # Safety
// `u`/`v` must hold `u_len`/`v_len` doubles; `out` writable.
enum EquimaxStatus equimax_ks_statistic(const double *u,
                                        size_t u_len,
                                        const double *v,
                                        size_t v_len,
                                        double *out);

// Add-one permutation p-value of the KS distance.
//
// # Safety
// `u`/`v` must hold `u_len`/`v_len` doubles; `out` writable.
enum EquimaxStatus equimax_permutation_pvalue(const double *u,
                                              size_t u_len,
                                              const double *v,
                                              size_t v_len,
                                              size_t permutations,
                                              uint64_t seed,
                                              double *out);

// Runs the goodness-of-fit test on `len` positive values. The seed drives
// both the grouping shuffle and the permutations.
//
// # Safety
// `values` must hold `len` doubles; `out` writable.
enum EquimaxStatus equimax_gof_run(const double *values,
                                   size_t len,
                                   size_t n,
                                   size_t permutations,
                                   double alpha,
                                   uint64_t seed,
                                   struct EquimaxTestReport **out);

// # Safety
// `report` must be NULL or a live handle.
void equimax_test_report_free(struct EquimaxTestReport *report);

// # Safety
// `report` must be a live handle; `out` writable.
enum EquimaxStatus equimax_test_report_summary(const struct EquimaxTestReport *report,
                                               struct EquimaxTestSummary *out);

// The report as JSON, keys in field order. Free with `equimax_string_free`.
//
// # Safety
// `report` must be a live handle; `out` writable.
enum EquimaxStatus equimax_test_report_to_json(const struct EquimaxTestReport *report, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUIMAX_H */
