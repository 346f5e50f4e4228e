#ifndef HOMLAB_H
#define HOMLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_SIZE_MISMATCH = 3,
  HL_STATUS_NOT_CONVERGED = 4,
  HL_STATUS_IO = 5,
  HL_STATUS_FORMAT = 6,
  HL_STATUS_PANIC = 7,
} HlStatus;

/**
 * Opaque coefficient field.
 */
typedef struct HlField HlField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next `hl_*` call on this thread.
 */
const char *hl_last_error_message(void);

/**
 * Creates a field from `len = d * L^d` edge values in canonical order.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` to a writable handle slot.
 */
enum HlStatus hl_field_new(uint32_t d,
                           uint32_t side,
                           double lambda,
                           const double *values,
                           size_t len,
                           struct HlField **out);

/**
 * Draws sample `sample_index` of the ensemble described by `ensemble_json`,
 * e.g. `{"kind": "bernoulli", "lambda": 0.25, "alpha": 0.25, "beta": 1, "p_low": 0.5}`.
 *
 * # Safety
 * `ensemble_json` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum HlStatus hl_field_sample(const char *ensemble_json,
                              uint32_t d,
                              uint32_t side,
                              uint64_t seed,
                              uint64_t sample_index,
                              struct HlField **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum HlStatus hl_field_load(const char *path, struct HlField **out);

/**
 * # Safety
 * `field` must be a live handle and `path` a NUL-terminated string.
 */
enum HlStatus hl_field_dump(const struct HlField *field, const char *path);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void hl_field_free(struct HlField *field);

/**
 * # Safety
 * `field` must be a live handle or null (which yields 0).
 */
uint32_t hl_field_dim(const struct HlField *field);

/**
 * # Safety
 * `field` must be a live handle or null (which yields 0).
 */
uint32_t hl_field_side(const struct HlField *field);

/**
 * # Safety
 * `field` must be a live handle or null (which yields NaN).
 */
double hl_field_lambda(const struct HlField *field);

/**
 * # Safety
 * `field` must be a live handle or null (which yields 0).
 */
size_t hl_field_num_edges(const struct HlField *field);

/**
 * Copies the edge values into `out`, which must hold exactly `hl_field_num_edges` doubles.
 *
 * # Safety
 * `field` must be a live handle and `out` must point to `len` writable doubles.
 */
enum HlStatus hl_field_values(const struct HlField *field, double *out, size_t len);

/**
 * Solves the corrector for direction `xi` (length d) and writes `phi` (L^d
 * values, pinned to 0 at the origin). `rel_tol <= 0` selects the default.
 *
 * # Safety
 * `field` must be a live handle, `xi` must point to `dim` readable doubles,
 * `phi_out` to `len` writable doubles and `residual_out` must be null or writable.
 */
enum HlStatus hl_solve_corrector(const struct HlField *field,
                                 const double *xi,
                                 size_t dim,
                                 double rel_tol,
                                 double *phi_out,
                                 size_t len,
                                 double *residual_out);

/**
 * Writes the `d x d` homogenized matrix row-major into `out` (`len = d * d`).
 *
 * # Safety
 * `field` must be a live handle and `out` must point to `len` writable doubles.
 */
enum HlStatus hl_homogenized_matrix(const struct HlField *field,
                                    double rel_tol,
                                    double *out,
                                    size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HOMLAB_H */
