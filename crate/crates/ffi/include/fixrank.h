#ifndef FIXRANK_H
#define FIXRANK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum FxStatus {
  FX_STATUS_OK = 0,
  /*
   Bad arguments or a failed validation.
   */
  FX_STATUS_INVALID_INPUT = 1,
  /*
   An enumeration would exceed its cap.
   */
  FX_STATUS_CAP_EXCEEDED = 2,
  FX_STATUS_IO = 3,
  FX_STATUS_NULL_POINTER = 4,
  /*
   A result does not fit the output type.
   */
  FX_STATUS_OVERFLOW = 5,
  FX_STATUS_PANIC = 6,
  FX_STATUS_INTERNAL = 7,
} FxStatus;

/*
 A number field.
 */
typedef struct FxField FxField;

/*
 A lattice in `O_K^n`.
 */
typedef struct FxLattice FxLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *fx_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fx_version(void);

/*
 Builtin field by name (`Q`, `Qi`, `Qsqrt2`, `Qsqrt5`, `Qzeta3`).

 # Safety
 `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FxStatus fx_field_builtin(const char *name, struct FxField **out_field);

/*
 Field of a monic irreducible polynomial, coefficients constant term first,
 with the power basis as integral basis.

 # Safety
 `coeffs` must point to `len` integers and `out` be a valid pointer.
 */
enum FxStatus fx_field_from_poly(const int64_t *coeffs, size_t len, struct FxField **out_field);

/*
 # Safety
 `field` must come from this library and not be used afterwards.
 */
void fx_field_free(struct FxField *field);

/*
 # Safety
 `field` must be a live handle; `out` a valid pointer.
 */
enum FxStatus fx_field_degree(const struct FxField *field, size_t *out_degree);

/*
 # Safety
 `field` must be a live handle; `out` a valid pointer.
 */
enum FxStatus fx_field_discriminant(const struct FxField *field, int64_t *out_disc);

/*
 `O_K^r` with unit covolume.

 # Safety
 `field` must be a live handle; `out` a valid pointer.
 */
enum FxStatus fx_lattice_ok_power(const struct FxField *field,
                                  size_t r,
                                  struct FxLattice **out_lattice);

/*
 Hecke neighbor of `O_K^n` for the first degree-one prime above `p` and
 the subspace of `F_p^n` spanned by the `s` rows of `rows` (row-major).

 # Safety
 `rows` must point to `s * n` values; `field` must be live; `out` valid.
 */
enum FxStatus fx_lattice_hecke_neighbor(const struct FxField *field,
                                        uint64_t p,
                                        size_t n,
                                        const uint64_t *rows,
                                        size_t s,
                                        struct FxLattice **out_lattice);

/*
 # Safety
 `lattice` must come from this library and not be used afterwards.
 */
void fx_lattice_free(struct FxLattice *lattice);

/*
 # Safety
 `lattice` must be live; `out` valid.
 */
enum FxStatus fx_lattice_rank(const struct FxLattice *lattice, size_t *out_rank);

/*
 Covolume of the lattice in its real span.

 # Safety
 `lattice` must be live; `out` valid.
 */
enum FxStatus fx_lattice_covolume(const struct FxLattice *lattice, double *out_covolume);

/*
 Number of lattice vectors of norm at most `radius`, zero included.

 # Safety
 `lattice` must be live; `out` valid.
 */
enum FxStatus fx_lattice_count_within(const struct FxLattice *lattice,
                                      double radius,
                                      uint64_t *out_count);

/*
 Number of rank-`k` matrices `A ∈ M_{n×m}(O_K)` with `|A| <= t * radius`.

 # Safety
 `field` must be live; `out` valid.
 */
enum FxStatus fx_count_rank(const struct FxField *field,
                            size_t n,
                            size_t m,
                            size_t k,
                            double t,
                            double radius,
                            uint64_t *out_count);

/*
 Truncated leading-constant series for the ball of `radius`.

 # Safety
 `field` must be live; `out` valid.
 */
enum FxStatus fx_c1_estimate(const struct FxField *field,
                             size_t n,
                             size_t m,
                             size_t k,
                             double radius,
                             double cutoff,
                             size_t mc_samples,
                             uint64_t seed,
                             double *out_value);

/*
 Number of `u`-dimensional subspaces of `F_q^t`.

 # Safety
 `out` must be valid.
 */
enum FxStatus fx_gaussian_binomial(size_t u, size_t t, uint64_t q, uint64_t *out_count);

/*
 Probability that a uniform `s`-subspace of `F_q^n` contains a fixed
 `k`-subspace, as a reduced fraction.

 # Safety
 `num` and `den` must be valid.
 */
enum FxStatus fx_containment_probability(size_t k,
                                         size_t s,
                                         size_t n,
                                         uint64_t q,
                                         uint64_t *num,
                                         uint64_t *den);

/*
 Average of `(sum_{v ∈ Λ} 1[|v| <= radius])^m` over the `(P, s)`-neighbors
 of `O_K^n`; all of them when `samples == 0`, else `samples` uniform draws.

 # Safety
 `field` must be live; `out` valid.
 */
enum FxStatus fx_moment(const struct FxField *field,
                        uint64_t p,
                        size_t n,
                        size_t s,
                        size_t m,
                        double radius,
                        bool include_zero,
                        size_t samples,
                        uint64_t seed,
                        double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIXRANK_H */
