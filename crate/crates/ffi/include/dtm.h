#ifndef DTM_H
#define DTM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DtmStatus {
  DTM_STATUS_OK = 0,
  DTM_STATUS_NULL_POINTER = 1,
  DTM_STATUS_INVALID_ARGUMENT = 2,
  DTM_STATUS_GUARD = 3,
  DTM_STATUS_INTERNAL = 4,
} DtmStatus;

/**
 * A point cloud in `R^d`.
 */
typedef struct DtmCloud DtmCloud;

/**
 * Exact k-distance of a cloud.
 */
typedef struct DtmKDistance DtmKDistance;

/**
 * Witnessed k-distance of a cloud.
 */
typedef struct DtmWitnessed DtmWitnessed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *dtm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dtm_version(void);

/**
 * Copies `n * dim` row-major coordinates into a new cloud.
 *
 * # Safety
 * `coords` must be valid for `n * dim` reads and `out` for one write.
 */
enum DtmStatus dtm_cloud_new(const double *coords, size_t n, size_t dim, struct DtmCloud **out);

/**
 * # Safety
 * `cloud` must be null or a handle from [`dtm_cloud_new`] not yet freed.
 */
void dtm_cloud_free(struct DtmCloud *cloud);

/**
 * # Safety
 * `cloud` must be a live handle and `n`, `dim` valid for one write each.
 */
enum DtmStatus dtm_cloud_shape(const struct DtmCloud *cloud, size_t *n, size_t *dim);

/**
 * Builds the witnessed k-distance of `cloud` (`1 <= k <= n`).
 *
 * # Safety
 * `cloud` must be a live handle and `out` valid for one write.
 */
enum DtmStatus dtm_witnessed_new(const struct DtmCloud *cloud, size_t k, struct DtmWitnessed **out);

/**
 * Evaluates at the point `x` of length `dim`.
 *
 * # Safety
 * `handle` must be live, `x` valid for `dim` reads, `out` for one write.
 */
enum DtmStatus dtm_witnessed_eval(const struct DtmWitnessed *handle,
                                  const double *x,
                                  size_t dim,
                                  double *out);

/**
 * # Safety
 * `handle` must be null or a live handle from [`dtm_witnessed_new`].
 */
void dtm_witnessed_free(struct DtmWitnessed *handle);

/**
 * Builds the exact k-distance of `cloud` (`1 <= k <= n`).
 *
 * # Safety
 * `cloud` must be a live handle and `out` valid for one write.
 */
enum DtmStatus dtm_kdist_new(const struct DtmCloud *cloud, size_t k, struct DtmKDistance **out);

/**
 * # Safety
 * `handle` must be live, `x` valid for `dim` reads, `out` for one write.
 */
enum DtmStatus dtm_kdist_eval(const struct DtmKDistance *handle,
                              const double *x,
                              size_t dim,
                              double *out);

/**
 * # Safety
 * `handle` must be null or a live handle from [`dtm_kdist_new`].
 */
void dtm_kdist_free(struct DtmKDistance *handle);

/**
 * Exact Wasserstein-2 distance between two discrete measures in `R^dim`
 * given by row-major supports and masses (each summing to one; masses must
 * be rational with small denominators).
 *
 * # Safety
 * Supports must be valid for `n * dim` reads, masses for `n` reads, `out`
 * for one write.
 */
enum DtmStatus dtm_w2(const double *support_a,
                      const double *mass_a,
                      size_t n_a,
                      const double *support_b,
                      const double *mass_b,
                      size_t n_b,
                      size_t dim,
                      double *out);

/**
 * Exact Wasserstein-2 distance between the uniform measures on two clouds.
 *
 * # Safety
 * Both clouds must be live handles and `out` valid for one write.
 */
enum DtmStatus dtm_w2_uniform(const struct DtmCloud *a, const struct DtmCloud *b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DTM_H */
