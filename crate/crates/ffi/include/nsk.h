#ifndef NSK_H
#define NSK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  NSK_STATUS_OK = 0,
  NSK_STATUS_NULL_POINTER = 1,
  NSK_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Parameters or configuration rejected by validation.
   */
  NSK_STATUS_REJECTED = 3,
  /**
   * The scenario ran and at least one verdict failed.
   */
  NSK_STATUS_VERDICT_FAILED = 4,
  /**
   * Execution error while running a scenario.
   */
  NSK_STATUS_RUN_FAILED = 5,
  NSK_STATUS_PANIC = 6,
} NskStatus;

typedef enum {
  NSK_REGIME_POSITIVE_REAL = 0,
  NSK_REGIME_NEGATIVE_OSCILLATORY = 1,
  NSK_REGIME_DEGENERATE = 2,
} NskRegime;

/**
 * Opaque validated scenario configuration.
 */
typedef struct NskConfig NskConfig;

/**
 * Opaque fluid parameters.
 */
typedef struct NskParams NskParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *nsk_last_error(void);

/**
 * Toolkit version as a static NUL-terminated string.
 */
const char *nsk_version(void);

/**
 * Parameters with the critical quadratic law `k (rho - rho_star)^2`.
 *
 * # Safety
 * `out` must be null or point to writable storage for one pointer.
 */
NskStatus nsk_params_new(double mu, double nu, double kappa, double rho, double k, NskParams **out);

/**
 * # Safety
 * `params` must be null or a handle from [`nsk_params_new`] not yet freed.
 */
void nsk_params_free(NskParams *params);

/**
 * Discriminant value and regime.
 *
 * # Safety
 * Pointers must be null or valid; `params` must be a live handle.
 */
NskStatus nsk_params_discriminant(const NskParams *params,
                                  double *out_value,
                                  NskRegime *out_regime);

/**
 * Solution operator at `(xi, t)` as a row-major `(dim+1) x (dim+1)`
 * complex matrix split into real and imaginary parts.
 *
 * # Safety
 * `xi` must hold `dim` values; `out_re` and `out_im` must each hold
 * `(dim+1)^2` values.
 */
NskStatus nsk_solution_symbol(const NskParams *params,
                              const double *xi,
                              uintptr_t dim,
                              double t,
                              double *out_re,
                              double *out_im);

/**
 * Relative Frobenius deviation of the closed-form symbol from the matrix
 * exponential reference.
 *
 * # Safety
 * `xi` must hold `dim` values and `out` must be writable.
 */
NskStatus nsk_symbol_deviation(const NskParams *params,
                               const double *xi,
                               uintptr_t dim,
                               double t,
                               double *out);

/**
 * `-(N/2)(1/q - 1/p) - j/2`; pass `INFINITY` for the sup norm.
 */
double nsk_predicted_exponent(uintptr_t dim, double p, double q, uint32_t j);

/**
 * Parses and validates a scenario TOML document.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
NskStatus nsk_config_parse(const char *text, NskConfig **out);

/**
 * # Safety
 * `config` must be null or a handle from [`nsk_config_parse`] not yet freed.
 */
void nsk_config_free(NskConfig *config);

/**
 * Runs the scenario and writes its artifacts into `out_dir`. Returns
 * `Ok` when every verdict passes and `VerdictFailed` otherwise.
 *
 * # Safety
 * `config` must be a live handle and `out_dir` a NUL-terminated string.
 */
NskStatus nsk_run_scenario(const NskConfig *config, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSK_H */
