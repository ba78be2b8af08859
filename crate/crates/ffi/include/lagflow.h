#ifndef LAGFLOW_H
#define LAGFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_ARGUMENT = 2,
  LF_STATUS_UNKNOWN_FIELD = 3,
  LF_STATUS_TIME_OUT_OF_DOMAIN = 4,
  LF_STATUS_NON_FINITE = 5,
  LF_STATUS_DEGENERATE_GEOMETRY = 6,
  LF_STATUS_UNSUPPORTED = 7,
  LF_STATUS_CONSTRAINT_VIOLATED = 8,
  LF_STATUS_CONFIG_ERROR = 9,
  LF_STATUS_IO_ERROR = 10,
  LF_STATUS_PANIC = 11,
} LfStatus;

/**
 * Opaque handle to a catalog flow field.
 */
typedef struct LfField LfField;

typedef struct LfVec3 {
  double x;
  double y;
  double z;
} LfVec3;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *lf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lf_version(void);

/**
 * Creates a catalog field. `params_json` is a JSON object of parameters
 * and may be null.
 *
 * # Safety
 * `name` and a non-null `params_json` must be NUL-terminated strings; `out`
 * must be valid for writing one pointer.
 */
enum LfStatus lf_field_new(const char *name, const char *params_json, struct LfField **out);

/**
 * Releases a field handle. Null is ignored.
 *
 * # Safety
 * `field` must come from [`lf_field_new`] and not have been freed.
 */
void lf_field_free(struct LfField *field);

/**
 * # Safety
 * `field` must be a live handle and `out` valid for writing.
 */
enum LfStatus lf_field_velocity(const struct LfField *field,
                                struct LfVec3 x,
                                double t,
                                struct LfVec3 *out);

/**
 * # Safety
 * `field` must be a live handle and `out` valid for writing.
 */
enum LfStatus lf_field_vorticity(const struct LfField *field,
                                 struct LfVec3 x,
                                 double t,
                                 struct LfVec3 *out);

/**
 * Pointwise Euler-equation residual with finite-difference step `fd_step`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writing.
 */
enum LfStatus lf_euler_residual(const struct LfField *field,
                                struct LfVec3 x,
                                double t,
                                double fd_step,
                                struct LfVec3 *out);

/**
 * Position of label `a` at time `t` using RK4 with step `h`. When
 * `jacobian` is non-null the 3×3 Jacobian `∂x_i/∂a_j` is written to it in
 * row-major order (9 doubles).
 *
 * # Safety
 * `field` must be a live handle, `out` valid for writing and a non-null
 * `jacobian` valid for writing 9 doubles.
 */
enum LfStatus lf_flow_map(const struct LfField *field,
                          struct LfVec3 a,
                          double t,
                          double h,
                          struct LfVec3 *out,
                          double *jacobian);

/**
 * Label of the particle found at `x` at time `t`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writing.
 */
enum LfStatus lf_inverse_map(const struct LfField *field,
                             struct LfVec3 x,
                             double t,
                             double h,
                             struct LfVec3 *out);

/**
 * `|det J − ρ₀/ρ|` along the trajectory of `a`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writing.
 */
enum LfStatus lf_mass_check(const struct LfField *field,
                            struct LfVec3 a,
                            double t,
                            double h,
                            double *out);

/**
 * Cauchy invariant of label `a` at time `t`; `drift` (may be null)
 * receives its distance from the initial vorticity.
 *
 * # Safety
 * `field` must be a live handle, `out` valid for writing and `drift` null
 * or valid for writing.
 */
enum LfStatus lf_cauchy_invariant(const struct LfField *field,
                                  struct LfVec3 a,
                                  double t,
                                  double h,
                                  struct LfVec3 *out,
                                  double *drift);

/**
 * Helicity over the periodic box with `n` points per axis; `obstruction`
 * (may be null) is set when the value rules out a global Clebsch pair.
 *
 * # Safety
 * `field` must be a live handle, `out` valid for writing and `obstruction`
 * null or valid for writing.
 */
enum LfStatus lf_helicity(const struct LfField *field,
                          double t,
                          size_t n,
                          double *out,
                          bool *obstruction);

/**
 * Runs an experiment config given as a JSON document without writing any
 * files. On success `summary_json` receives the run summary, to be released
 * with [`lf_string_free`]; tolerance failures and numerical errors inside
 * the run are reported in the summary, not in the status.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `summary_json` valid
 * for writing one pointer.
 */
enum LfStatus lf_run_config(const char *config_json, char **summary_json);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAGFLOW_H */
