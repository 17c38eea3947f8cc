#ifndef MONGE_H
#define MONGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum MongeStatus {
  MONGE_STATUS_OK = 0,
  MONGE_STATUS_NULL_POINTER = 1,
  MONGE_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The solve finished without meeting the residual tolerance. A result is
   * still produced.
   */
  MONGE_STATUS_NOT_CONVERGED = 3,
  MONGE_STATUS_SOLVER_ERROR = 4,
  MONGE_STATUS_BUFFER_TOO_SMALL = 5,
  MONGE_STATUS_PANIC = 6,
} MongeStatus;

/**
 * Values accepted for the `example` argument of [`monge_config_new`].
 */
typedef enum MongeExample {
  MONGE_EXAMPLE_C2 = 0,
  MONGE_EXAMPLE_C1 = 1,
  MONGE_EXAMPLE_BLOWUP = 2,
  MONGE_EXAMPLE_CONE = 3,
  MONGE_EXAMPLE_EIKONAL1D = 4,
} MongeExample;

/**
 * Values accepted for the `scheme` argument of [`monge_config_new`].
 */
typedef enum MongeScheme {
  MONGE_SCHEME_MONOTONE = 0,
  MONGE_SCHEME_FILTERED = 1,
} MongeScheme;

/**
 * Values accepted by [`monge_config_set_cone_mass`].
 */
typedef enum MongeConeMass {
  MONGE_CONE_MASS_STENCIL = 0,
  MONGE_CONE_MASS_BALL = 1,
} MongeConeMass;

/**
 * Opaque run configuration.
 */
typedef struct MongeConfig MongeConfig;

/**
 * Opaque solve result.
 */
typedef struct MongeResult MongeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if the last call
 * succeeded. The pointer stays valid until the next call into this library
 * on the same thread.
 */
const char *monge_last_error(void);

/**
 * Creates a configuration with default solver settings. `example` is a
 * [`MongeExample`] value and `scheme` a [`MongeScheme`] value. Returns null
 * and sets the last error if an argument is invalid.
 */
struct MongeConfig *monge_config_new(uint32_t example, size_t n, uint32_t width, uint32_t scheme);

/**
 * Frees a configuration. Null is ignored.
 *
 * # Safety
 * `config` must be null or a pointer returned by [`monge_config_new`] that
 * has not been freed.
 */
void monge_config_free(struct MongeConfig *config);

/**
 * Sets the filter scale. A non-positive value restores the default rule
 * `sqrt(h) + dtheta / 10`.
 *
 * # Safety
 * `config` must be null or a live configuration handle.
 */
enum MongeStatus monge_config_set_epsilon(struct MongeConfig *config, double epsilon);

/**
 * Sets the residual tolerance and the Newton iteration budget.
 *
 * # Safety
 * `config` must be null or a live configuration handle.
 */
enum MongeStatus monge_config_set_tolerance(struct MongeConfig *config,
                                            double residual_tol,
                                            size_t max_iter);

/**
 * Selects the exact filtered Jacobian (`true`) or the modified one (`false`).
 *
 * # Safety
 * `config` must be null or a live configuration handle.
 */
enum MongeStatus monge_config_set_exact_jacobian(struct MongeConfig *config, bool exact);

/**
 * Sets the cone's center source value from a [`MongeConeMass`] value.
 *
 * # Safety
 * `config` must be null or a live configuration handle.
 */
enum MongeStatus monge_config_set_cone_mass(struct MongeConfig *config, uint32_t mass);

/**
 * Solves the configured problem and stores a new result handle in `*out`.
 *
 * Returns [`MongeStatus::Ok`] on convergence and [`MongeStatus::NotConverged`]
 * when Newton stopped early; both produce a result. On any other status
 * `*out` is set to null.
 *
 * # Safety
 * `config` must be null or a live configuration handle and `out` must be
 * null or valid for a pointer write.
 */
enum MongeStatus monge_solve(const struct MongeConfig *config, struct MongeResult **out);

/**
 * Frees a result. Null is ignored.
 *
 * # Safety
 * `result` must be null or a pointer produced by [`monge_solve`] that has not
 * been freed.
 */
void monge_result_free(struct MongeResult *result);

/**
 * Max error against the exact solution.
 *
 * # Safety
 * `result` must be null or a live result handle, and `out` null or writable.
 */
enum MongeStatus monge_result_max_error(const struct MongeResult *result, double *out);

/**
 * Residual max-norm at the returned iterate.
 *
 * # Safety
 * `result` must be null or a live result handle, and `out` null or writable.
 */
enum MongeStatus monge_result_residual_norm(const struct MongeResult *result, double *out);

/**
 * Number of accepted Newton steps.
 *
 * # Safety
 * `result` must be null or a live result handle, and `out` null or writable.
 */
enum MongeStatus monge_result_iterations(const struct MongeResult *result, size_t *out);

/**
 * Whether the residual tolerance was met.
 *
 * # Safety
 * `result` must be null or a live result handle, and `out` null or writable.
 */
enum MongeStatus monge_result_converged(const struct MongeResult *result, bool *out);

/**
 * Number of solution values (`n * n` in 2D, `n` for the 1D example).
 *
 * # Safety
 * `result` must be null or a live result handle, and `out` null or writable.
 */
enum MongeStatus monge_result_len(const struct MongeResult *result, size_t *out);

/**
 * Copies the solution, row by row with `x` varying fastest, into `buf`.
 * Fails with [`MongeStatus::BufferTooSmall`] if `capacity` is less than
 * [`monge_result_len`].
 *
 * # Safety
 * `result` must be null or a live result handle, and `buf` must be null or
 * valid for `capacity` writes of `double`.
 */
enum MongeStatus monge_result_copy_solution(const struct MongeResult *result,
                                            double *buf,
                                            size_t capacity);

/**
 * The filter function: identity on `[-1, 1]`, zero for `|x| >= 2`.
 */
double monge_filter_s(double x);

/**
 * Default filter scale `sqrt(h) + dtheta / 10`.
 */
double monge_epsilon_rule(double h, double dtheta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONGE_H */
