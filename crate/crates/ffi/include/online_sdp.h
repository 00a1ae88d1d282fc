/* C interface of the online-sdp library. */

#ifndef ONLINE_SDP_H
#define ONLINE_SDP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum OsdpStatus {
  OSDP_STATUS_OK = 0,
  OSDP_STATUS_NULL_POINTER = 1,
  OSDP_STATUS_INVALID_ARGUMENT = 2,
  OSDP_STATUS_NUMERICAL_FAILURE = 3,
  OSDP_STATUS_LENGTH_MISMATCH = 4,
} OsdpStatus;

/**
 * Which per-round series of a run to copy out.
 */
typedef enum OsdpSeries {
  OSDP_SERIES_LOSS = 0,
  OSDP_SERIES_CUM_LOSS = 1,
  OSDP_SERIES_COMPARATOR_CUM = 2,
  OSDP_SERIES_REGRET = 3,
  OSDP_SERIES_BOUND = 4,
} OsdpSeries;

/**
 * Opaque symmetric matrix handle.
 */
typedef struct OsdpMatrix OsdpMatrix;

/**
 * Opaque handle to a finished run.
 */
typedef struct OsdpRun OsdpRun;

/**
 * Scalar summary of a finished run. `epsilon` is NaN when the regularizer
 * has no shift parameter.
 */
typedef struct OsdpRunSummary {
  double final_regret;
  double bound;
  double ratio;
  double eta;
  double epsilon;
  double strong_convexity;
  double regularizer_range;
  uint64_t seed;
  uint64_t rounds;
} OsdpRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *osdp_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes (or be NULL to query the length).
 */
size_t osdp_last_error(char *buf, size_t cap);

/**
 * Releases a string returned through a `char**` output.
 *
 * # Safety
 * `text` must have been returned by this library and not freed before.
 */
void osdp_text_free(char *text);

/**
 * Builds a symmetric matrix from `order*order` row-major entries
 * (symmetrized as `(A+Aᵀ)/2`).
 *
 * # Safety
 * `entries` must point to `order*order` doubles; `out` must be non-NULL.
 */
enum OsdpStatus osdp_matrix_new(size_t order, const double *entries, struct OsdpMatrix **out);

/**
 * # Safety
 * `matrix` must be a live handle from `osdp_matrix_new` (or NULL).
 */
void osdp_matrix_free(struct OsdpMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle or NULL.
 */
size_t osdp_matrix_order(const struct OsdpMatrix *matrix);

/**
 * Eigendecomposition: descending eigenvalues into `values` (length `order`)
 * and, unless NULL, the orthogonal eigenvector matrix into `vectors`
 * (row-major `order*order`, columns are eigenvectors).
 *
 * # Safety
 * Buffers must match the matrix order as described.
 */
enum OsdpStatus osdp_matrix_eig(const struct OsdpMatrix *matrix, double *values, double *vectors);

/**
 * Trace, spectral and Frobenius norms (each output optional).
 *
 * # Safety
 * `matrix` must be a live handle; non-NULL outputs must be writable.
 */
enum OsdpStatus osdp_matrix_norms(const struct OsdpMatrix *matrix,
                                  double *trace,
                                  double *spectral,
                                  double *frobenius);

/**
 * Frobenius inner product of two matrices of equal order.
 *
 * # Safety
 * Both handles must be live; `out` must be non-NULL.
 */
enum OsdpStatus osdp_matrix_inner(const struct OsdpMatrix *a,
                                  const struct OsdpMatrix *b,
                                  double *out);

/**
 * Frobenius-nearest matrix with eigenvalues at least `floor`.
 *
 * # Safety
 * `matrix` must be a live handle; `out` must be non-NULL.
 */
enum OsdpStatus osdp_matrix_psd_floor(const struct OsdpMatrix *matrix,
                                      double floor,
                                      struct OsdpMatrix **out);

/**
 * Log-determinant regularizer `−ln det(X+εE)`: value, and unless NULL the
 * gradient entries (row-major `order*order`).
 *
 * # Safety
 * `matrix` must be a live handle; `value` non-NULL; `gradient` NULL or
 * `order*order` doubles.
 */
enum OsdpStatus osdp_logdet(const struct OsdpMatrix *matrix,
                            double epsilon,
                            double *value,
                            double *gradient);

/**
 * Executes a run described by a TOML configuration string with the same
 * keys as the CLI flags (`problem = "logdet-main"`, `horizon = 128`, ...).
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `out` must be non-NULL.
 */
enum OsdpStatus osdp_run_execute(const char *config_toml, struct OsdpRun **out);

/**
 * # Safety
 * `run` must be a live handle from `osdp_run_execute` (or NULL).
 */
void osdp_run_free(struct OsdpRun *run);

/**
 * Number of recorded rounds.
 *
 * # Safety
 * `run` must be a live handle or NULL.
 */
size_t osdp_run_rounds(const struct OsdpRun *run);

/**
 * Copies one per-round series into `out`, which must hold exactly
 * `osdp_run_rounds` doubles.
 *
 * # Safety
 * `run` must be a live handle; `out` must hold `len` doubles.
 */
enum OsdpStatus osdp_run_series(const struct OsdpRun *run,
                                enum OsdpSeries series,
                                double *out,
                                size_t len);

/**
 * Scalar summary of the run.
 *
 * # Safety
 * `run` must be a live handle; `out` must be non-NULL.
 */
enum OsdpStatus osdp_run_summary(const struct OsdpRun *run, struct OsdpRunSummary *out);

/**
 * The run's per-round table as CSV text (`osdp_text_free` to release).
 *
 * # Safety
 * `run` must be a live handle; `out` must be non-NULL.
 */
enum OsdpStatus osdp_run_csv(const struct OsdpRun *run, char **out);

/**
 * Runs a validation suite. `samples = 0` keeps each suite's default count.
 * On success `all_pass` is 1 when every check passed and `report` (unless
 * NULL) receives one line per check.
 *
 * # Safety
 * `suite` must be NUL-terminated; `all_pass` non-NULL; `report` NULL or a
 * writable `char**`.
 */
enum OsdpStatus osdp_validate(const char *suite,
                              size_t samples,
                              uint64_t seed,
                              int32_t *all_pass,
                              char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONLINE_SDP_H */
