#ifndef NILSPEC_H
#define NILSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NsStatus {
  NS_STATUS_OK = 0,
  NS_STATUS_NULL_POINTER = 1,
  NS_STATUS_INDEX = 2,
  NS_STATUS_DIMENSION = 3,
  NS_STATUS_LEAKAGE = 4,
  NS_STATUS_EMPTY_BLOCK = 5,
  NS_STATUS_PRECONDITION = 6,
  NS_STATUS_NON_HERMITIAN = 7,
  NS_STATUS_NOT_H_TYPE = 8,
  NS_STATUS_QUADRATURE = 9,
  NS_STATUS_FIT = 10,
  NS_STATUS_CERTIFICATE = 11,
  NS_STATUS_INPUT = 12,
  NS_STATUS_IO = 13,
  NS_STATUS_JSON = 14,
  NS_STATUS_BUFFER_TOO_SMALL = 15,
  NS_STATUS_PANIC = 16,
} NsStatus;

typedef enum NsGroupKind {
  NS_GROUP_KIND_HEISENBERG = 0,
  NS_GROUP_KIND_D_GROUP = 1,
} NsGroupKind;

/*
 Heisenberg context (n, k, p) with its Laplacian prebuilt.
 */
typedef struct NsHeisenberg NsHeisenberg;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failing call on this thread ("" after success).
 The pointer stays valid until the next call on the same thread.
 */
const char *ns_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *ns_version(void);

/*
 Lowest eigenvalue k² + (n−q)k of the p-form Laplacian on H^{2n+1}
 (q the Hodge-reflected degree) and its multiplicity.

 # Safety
 `value` and `multiplicity` must be valid for writes.
 */
enum NsStatus ns_catalog_lowest(size_t n,
                                size_t p,
                                double k,
                                double *value,
                                uint64_t *multiplicity);

/*
 Bracket for the lowest 1-form eigenvalue of the D group at |λ| = lambda_norm.

 # Safety
 `lower` and `upper` must be valid for writes.
 */
enum NsStatus ns_dgroup_lowest_bracket(size_t n, double lambda_norm, double *lower, double *upper);

/*
 Closed-form decay exponent num/den for the given group and degree.

 # Safety
 `num` and `den` must be valid for writes.
 */
enum NsStatus ns_alpha_closed_form(enum NsGroupKind kind,
                                   size_t n,
                                   size_t p,
                                   uint64_t *num,
                                   uint64_t *den);

/*
 Fitted decay exponent of the lowest-band heat trace on the default
 t grid (25 points from 1e2 to 1e5). The D group uses the bracket midpoint.

 # Safety
 `alpha_hat` must be valid for writes; `stderr_out` may be null.
 */
enum NsStatus ns_heat_exponent(enum NsGroupKind kind,
                               size_t n,
                               size_t p,
                               double *alpha_hat,
                               double *stderr_out);

/*
 Decay exponent fitted to caller-supplied samples (t strictly increasing,
 θ positive and strictly decreasing, at least 10 points).

 # Safety
 `t` and `theta` must point to `len` readable doubles; `alpha_hat` must
 be valid for writes; `stderr_out` may be null.
 */
enum NsStatus ns_fit_alpha(const double *t,
                           const double *theta,
                           size_t len,
                           double *alpha_hat,
                           double *stderr_out);

/*
 Creates a Heisenberg context with n pairs, parameter k > 0, degree p.

 # Safety
 `out` must be valid for writes. On success `*out` owns a handle to be
 released with [`ns_heisenberg_free`].
 */
enum NsStatus ns_heisenberg_new(size_t n, double k, size_t p, struct NsHeisenberg **out);

/*
 Releases a handle from [`ns_heisenberg_new`]; null is ignored.

 # Safety
 `h` must be null or a handle not yet freed.
 */
void ns_heisenberg_free(struct NsHeisenberg *h);

/*
 Eigenvalues (ascending) of the Laplacian on block γ. Writes the count to
 `len`; if `capacity` is too small nothing is copied and
 `NS_STATUS_BUFFER_TOO_SMALL` is returned with `len` set.

 # Safety
 `h` must be a live handle, `gamma` must point to `gamma_len` ints,
 `out` to `capacity` writable doubles (may be null if capacity is 0),
 and `len` must be valid for writes.
 */
enum NsStatus ns_heisenberg_block_spectrum(const struct NsHeisenberg *h,
                                           const int32_t *gamma,
                                           size_t gamma_len,
                                           double *out,
                                           size_t capacity,
                                           size_t *len);

/*
 Smallest eigenvalue over all blocks with |γ| ≤ gamma_max.

 # Safety
 `h` must be a live handle and `value` valid for writes.
 */
enum NsStatus ns_heisenberg_lowest(const struct NsHeisenberg *h, int32_t gamma_max, double *value);

/*
 Runs a named verification suite ("commutators", "appendixA", "kernel",
 "hodge", "htype", "dgroup") on its default grid; `passed` receives 1 or 0.

 # Safety
 `name` must be a NUL-terminated string and `passed` valid for writes.
 */
enum NsStatus ns_verify_suite(const char *name, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILSPEC_H */
