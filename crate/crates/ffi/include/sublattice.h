#ifndef SUBLATTICE_H
#define SUBLATTICE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every `sl_*` call.
 */
enum SlStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_NOT_MULTIPLICATIVE = 3,
  SL_STATUS_OVERFLOW = 4,
  SL_STATUS_BUDGET_EXHAUSTED = 5,
  SL_STATUS_INTERNAL = 6,
  SL_STATUS_PANIC = 7,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum SlStatus SlStatus;
#else
typedef int32_t SlStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque lattice handle.
 */
typedef struct SlLattice SlLattice;

/**
 * Outcome of [`sl_verify_main_theorem`].
 */
typedef struct SlReport {
  size_t n;
  size_t k;
  uint64_t r;
  uint64_t oracle_count;
  uint64_t formula_count;
  uint64_t stirling_factor;
  uint64_t phi_base;
  size_t witnesses_checked;
  bool passed;
} SlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * NUL-terminated engine version string with static lifetime.
 */
const char *sl_version(void);

/**
 * Message for the last failed call on this thread; empty after success.
 *
 * The pointer stays valid until the next `sl_*` call on the same thread.
 */
const char *sl_last_error_message(void);

/**
 * Builds the lattice spanned by `rows` row vectors of length `ambient`,
 * stored row-major in `entries`. `entries` may be null when `rows` is 0.
 *
 * # Safety
 * `entries` must point to `rows * ambient` readable values and `out` must be
 * writable.
 */
SlStatus sl_lattice_new(size_t ambient,
                        size_t rows,
                        const int64_t *entries,
                        struct SlLattice **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `l` must come from [`sl_lattice_new`] and not have been freed.
 */
void sl_lattice_free(struct SlLattice *l);

/**
 * # Safety
 * `l` must be a live handle and `out` writable.
 */
SlStatus sl_lattice_rank(const struct SlLattice *l, size_t *out);

/**
 * # Safety
 * `l` must be a live handle and `out` writable.
 */
SlStatus sl_lattice_ambient(const struct SlLattice *l, size_t *out);

/**
 * Copies the canonical Hermite basis, row-major, into `buf`.
 *
 * `*needed` receives `rank * ambient`. If `capacity` is smaller, nothing is
 * copied and `SL_STATUS_INVALID_ARGUMENT` is returned; `buf` may then be null.
 *
 * # Safety
 * `buf` must hold `capacity` writable values; `needed` must be writable.
 */
SlStatus sl_lattice_basis(const struct SlLattice *l, int64_t *buf, size_t capacity, size_t *needed);

/**
 * # Safety
 * `l` must be a live handle and `out` writable.
 */
SlStatus sl_lattice_is_multiplicative(const struct SlLattice *l, bool *out);

/**
 * Size of the torsion subgroup of `Z^ambient / L`.
 *
 * # Safety
 * `l` must be a live handle and `out` writable.
 */
SlStatus sl_lattice_torsion_size(const struct SlLattice *l, uint64_t *out);

/**
 * # Safety
 * `l` must be a live handle and `out` writable.
 */
SlStatus sl_lattice_distinct_nonzero_columns(const struct SlLattice *l, size_t *out);

/**
 * Whether the number of distinct nonzero basis columns equals the rank.
 *
 * # Safety
 * `l` must be a live handle and `out` writable.
 */
SlStatus sl_lattice_rigidity_check(const struct SlLattice *l, bool *out);

/**
 * Equality of row spans.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
SlStatus sl_lattice_equal(const struct SlLattice *a, const struct SlLattice *b, bool *out);

/**
 * Stirling number of the second kind `S(u, v)`.
 *
 * # Safety
 * `out` must be writable.
 */
SlStatus sl_stirling2(size_t u, size_t v, uint64_t *out);

/**
 * `φ_n(r)`. `jobs == 0` uses every core; `max_steps == 0` the default budget.
 *
 * # Safety
 * `out` must be writable.
 */
SlStatus sl_phi(size_t n, uint64_t r, size_t jobs, uint64_t max_steps, uint64_t *out);

/**
 * `f_n(r)`, for `n >= 1`.
 *
 * # Safety
 * `out` must be writable.
 */
SlStatus sl_f_count(size_t n, uint64_t r, size_t jobs, uint64_t max_steps, uint64_t *out);

/**
 * `S(n+k+1, n+1) · φ_n(r)`.
 *
 * # Safety
 * `out` must be writable.
 */
SlStatus sl_phi_corank_formula(size_t n,
                               size_t k,
                               uint64_t r,
                               size_t jobs,
                               uint64_t max_steps,
                               uint64_t *out);

/**
 * Brute-force count of co-rank `corank` multiplicative sublattices of
 * `Z^ambient` with torsion size `r`.
 *
 * # Safety
 * `out` must be writable.
 */
SlStatus sl_corank_oracle_count(size_t ambient,
                                size_t corank,
                                uint64_t r,
                                uint64_t bound_multiplier,
                                size_t jobs,
                                uint64_t max_steps,
                                uint64_t *out);

/**
 * Compares oracle and formula for one `(n, k, r)` cell.
 *
 * A failed comparison is still `SL_STATUS_OK`; check `passed`.
 *
 * # Safety
 * `out` must be writable.
 */
SlStatus sl_verify_main_theorem(size_t n,
                                size_t k,
                                uint64_t r,
                                uint64_t bound_multiplier,
                                size_t jobs,
                                uint64_t max_steps,
                                struct SlReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBLATTICE_H */
