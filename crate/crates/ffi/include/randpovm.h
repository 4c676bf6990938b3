#ifndef RANDPOVM_H
#define RANDPOVM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_ARGUMENT = 2,
  RP_STATUS_DEPENDENT = 3,
  RP_STATUS_DEGENERATE_PAIR = 4,
  RP_STATUS_NORMALISATION = 5,
  RP_STATUS_BAD_DESCRIPTOR = 6,
  RP_STATUS_BUFFER_TOO_SMALL = 7,
  RP_STATUS_PANIC = 99,
} RpStatus;

/**
 * Density matrix handle.
 */
typedef struct RpDensity RpDensity;

/**
 * Finite group with its subgroups, irreps and coset states.
 */
typedef struct RpGroup RpGroup;

/**
 * POVM handle.
 */
typedef struct RpPovm RpPovm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rp_last_error(char *buf, size_t len);

/**
 * Density matrix from a `dim x dim` row-major matrix. `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `dim * dim` doubles; `out` must be valid.
 */
enum RpStatus rp_density_new(size_t dim,
                             const double *re,
                             const double *im,
                             struct RpDensity **out);

/**
 * Pure state `|psi><psi|` from a unit vector of length `dim`.
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `dim` doubles; `out` must be valid.
 */
enum RpStatus rp_density_from_pure(size_t dim,
                                   const double *re,
                                   const double *im,
                                   struct RpDensity **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, not freed before.
 */
void rp_density_free(struct RpDensity *d);

/**
 * # Safety
 * `d` must be a live handle; `dim` must be valid.
 */
enum RpStatus rp_density_dim(const struct RpDensity *d, size_t *dim);

/**
 * Trace norm and Frobenius norm of `a - b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `trace`, `frobenius` must be valid.
 */
enum RpStatus rp_density_distances(const struct RpDensity *a,
                                   const struct RpDensity *b,
                                   double *trace,
                                   double *frobenius);

/**
 * Random POVM from `n * k` Gaussian vectors, on stream `(seed, stream)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum RpStatus rp_povm_random(size_t n,
                             size_t k,
                             uint64_t seed,
                             uint64_t stream,
                             struct RpPovm **out);

/**
 * Projective measurement in a Haar-random basis, on stream `(seed, stream)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum RpStatus rp_povm_haar_basis(size_t n, uint64_t seed, uint64_t stream, struct RpPovm **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not freed before.
 */
void rp_povm_free(struct RpPovm *p);

/**
 * Number of outcomes and Hilbert space dimension.
 *
 * # Safety
 * `p` must be a live handle; `outcomes`, `dim` must be valid.
 */
enum RpStatus rp_povm_shape(const struct RpPovm *p, size_t *outcomes, size_t *dim);

/**
 * Outcome probabilities of measuring `d` with `p`, written to `probs`.
 *
 * # Safety
 * Handles must be live; `probs` must hold `len` doubles.
 */
enum RpStatus rp_measure(const struct RpPovm *p,
                         const struct RpDensity *d,
                         double *probs,
                         size_t len);

/**
 * `sum |p_i - q_i|`, in `[0, 2]`.
 *
 * # Safety
 * `p`, `q` must hold `len` doubles; `tv` must be valid.
 */
enum RpStatus rp_total_variation(const double *p, const double *q, size_t len, double *tv);

/**
 * Group from a descriptor such as `"dihedral:4"` or `"cyclic:2*affine:3"`.
 *
 * # Safety
 * `descriptor` must be a NUL-terminated string; `out` must be valid.
 */
enum RpStatus rp_group_new(const char *descriptor, struct RpGroup **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not freed before.
 */
void rp_group_free(struct RpGroup *g);

/**
 * Group order and number of subgroups.
 *
 * # Safety
 * `g` must be a live handle; `order`, `subgroups` must be valid.
 */
enum RpStatus rp_group_shape(const struct RpGroup *g, size_t *order, size_t *subgroups);

/**
 * Order of subgroup `i` (subgroups are sorted by order, then elements).
 *
 * # Safety
 * `g` must be a live handle; `order` must be valid.
 */
enum RpStatus rp_subgroup_order(const struct RpGroup *g, size_t i, size_t *order);

/**
 * Trace norm of the difference of two coset states.
 *
 * # Safety
 * `g` must be a live handle; `dist` must be valid.
 */
enum RpStatus rp_coset_trace_distance(const struct RpGroup *g, size_t i, size_t j, double *dist);

/**
 * Irrep-distribution distances `w` and `r` between subgroups `i` and `j`.
 *
 * # Safety
 * `g` must be a live handle; `w`, `r` must be valid.
 */
enum RpStatus rp_subgroup_distances(const struct RpGroup *g,
                                    size_t i,
                                    size_t j,
                                    double *w,
                                    double *r);

/**
 * Fraction of `runs` identification runs that recover subgroup `hidden`
 * from `copies` samples, with ancilla constant `c`. Same streams as the CLI
 * `hsp` command with the same seed.
 *
 * # Safety
 * `g` must be a live handle; `rate` must be valid.
 */
enum RpStatus rp_hsp_success_rate(const struct RpGroup *g,
                                  size_t hidden,
                                  size_t copies,
                                  size_t runs,
                                  double c,
                                  uint64_t seed,
                                  double *rate);

/**
 * Copy count `ceil(c ln m / delta^2)` for identifying among `m` states.
 *
 * # Safety
 * `copies` must be valid.
 */
enum RpStatus rp_copies_for(size_t m, double delta, double c, size_t *copies);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANDPOVM_H */
