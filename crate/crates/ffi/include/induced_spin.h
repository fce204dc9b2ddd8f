#ifndef INDUCED_SPIN_H
#define INDUCED_SPIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IsStatus {
  IS_STATUS_OK = 0,
  IS_STATUS_NULL_POINTER = 1,
  IS_STATUS_INVALID_ARGUMENT = 2,
  IS_STATUS_NOT_TIMELIKE = 3,
  IS_STATUS_NOT_UNIMODULAR = 4,
  IS_STATUS_FOLIATION_MISMATCH = 5,
  IS_STATUS_TRUNCATED_SECTOR = 6,
  IS_STATUS_PANIC = 7,
} IsStatus;

typedef enum IsStatistics {
  IS_STATISTICS_BOSON = 0,
  IS_STATISTICS_FERMION = 1,
} IsStatistics;

/**
 * Opaque truncated Fock space.
 */
typedef struct IsFockSpace IsFockSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t is_last_error_message(char *buf, size_t len);

/**
 * Lorentz matrix `Λ(A)` of a unimodular `A`.
 *
 * # Safety
 * `a` must point to 8 doubles and `out` to 16.
 */
enum IsStatus is_spinor_to_lorentz(const double *a, double *out);

/**
 * Canonical boost `L(n)` for a future timelike unit `n`.
 *
 * # Safety
 * `n` must point to 4 doubles and `out` to 8.
 */
enum IsStatus is_boost_of(const double *n, double *out);

/**
 * Little-group element `D(A, n)`.
 *
 * # Safety
 * `a` must point to 8 doubles, `n` to 4 and `out` to 8.
 */
enum IsStatus is_wigner_little_group(const double *a, const double *n, double *out);

/**
 * `⟨j1 m1; j2 m2 | j m⟩` in the Condon-Shortley convention.
 *
 * # Safety
 * `out` must point to one writable double.
 */
enum IsStatus is_clebsch_gordan(double j1,
                                double m1,
                                double j2,
                                double m2,
                                double j,
                                double m,
                                double *out);

/**
 * Builds a Fock space of `modes` abstract modes on the leaf `n` (rest frame
 * when `n` is null).
 *
 * # Safety
 * `n` must be null or point to 4 doubles; `out` must be a valid pointer.
 * The handle is released with [`is_fock_space_free`].
 */
enum IsStatus is_fock_space_new(size_t modes,
                                size_t n_max,
                                enum IsStatistics statistics,
                                const double *n,
                                struct IsFockSpace **out);

/**
 * # Safety
 * `space` must come from [`is_fock_space_new`]; `out` must be valid.
 */
enum IsStatus is_fock_space_dim(const struct IsFockSpace *space, size_t *out);

/**
 * `[a(φ), a†(ψ)]∓` as a scalar. `phi` and `psi` hold `2·modes` doubles
 * (interleaved real and imaginary parts); `out` receives two.
 *
 * # Safety
 * All pointers must be valid for the stated lengths.
 */
enum IsStatus is_fock_space_bracket(const struct IsFockSpace *space,
                                    const double *phi,
                                    const double *psi,
                                    double *out);

/**
 * # Safety
 * `space` must be null or come from [`is_fock_space_new`] and not be used
 * afterwards.
 */
void is_fock_space_free(struct IsFockSpace *space);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INDUCED_SPIN_H */
