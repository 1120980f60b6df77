#ifndef RAHMAN_H
#define RAHMAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes, equal to the CLI exit codes.
 */
typedef enum RahmanStatus {
  RAHMAN_STATUS_OK = 0,
  /**
   * A verification did not hold, or an I/O or internal error occurred.
   */
  RAHMAN_STATUS_FAILURE = 1,
  /**
   * Malformed arguments: null pointers, bad rationals, out-of-range values.
   */
  RAHMAN_STATUS_INVALID_INPUT = 2,
  /**
   * Parameters at which a required quantity is undefined or singular.
   */
  RAHMAN_STATUS_DEGENERATE = 3,
} RahmanStatus;

/**
 * Exact rational matrix with simplex-ordered rows and columns.
 */
typedef struct RahmanMatrix RahmanMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rahman_last_error(void);

/**
 * Library version as a static string.
 */
const char *rahman_version(void);

/**
 * Transition matrix of the `size`-dice chain.
 *
 * # Safety
 * The four rationals must be valid NUL-terminated strings; `out` must be
 * writable.
 */
enum RahmanStatus rahman_kernel(size_t size,
                                const char *alpha1,
                                const char *alpha2,
                                const char *beta1,
                                const char *beta2,
                                struct RahmanMatrix **out);

/**
 * Values `P_{m,n}(x,y)`; rows are frequency states, columns physical states.
 *
 * # Safety
 * `p` must point to four valid NUL-terminated strings; `out` must be
 * writable.
 */
enum RahmanStatus rahman_poly_matrix(size_t size, const char *const *p, struct RahmanMatrix **out);

/**
 * Five-point operator for multiplication by `(p1+p2)x - (p3+p4)y`.
 *
 * # Safety
 * As for [`rahman_poly_matrix`].
 */
enum RahmanStatus rahman_bispectral(size_t size, const char *const *p, struct RahmanMatrix **out);

/**
 * Checks the eigenvalue relation. `alpha2` may be null, in which case it is
 * derived from `alpha1`; `beta` always comes from the stationarity map.
 * Returns `Ok` when every relation holds exactly and `Failure` otherwise.
 *
 * # Safety
 * `p` must point to four valid strings, `alpha1` must be valid, `alpha2`
 * valid or null.
 */
enum RahmanStatus rahman_verify_eigen(size_t size,
                                      const char *const *p,
                                      const char *alpha1,
                                      const char *alpha2);

/**
 * Checks that the Gram matrix under the trinomial weight is diagonal.
 *
 * # Safety
 * `p` must point to four valid NUL-terminated strings.
 */
enum RahmanStatus rahman_verify_orthogonality(size_t size, const char *const *p);

/**
 * Runs the chain and returns transition counts as CSV in `*out_csv`.
 *
 * # Safety
 * The rationals must be valid strings and `out_csv` writable.
 */
enum RahmanStatus rahman_simulate(size_t size,
                                  const char *alpha1,
                                  const char *alpha2,
                                  const char *beta1,
                                  const char *beta2,
                                  size_t start_red,
                                  size_t start_black,
                                  uint64_t steps,
                                  uint64_t seed,
                                  char **out_csv);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t rahman_matrix_rows(const struct RahmanMatrix *m);

/**
 * Number of columns; 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t rahman_matrix_cols(const struct RahmanMatrix *m);

/**
 * Entry as a `"num/den"` string in `*out`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum RahmanStatus rahman_matrix_entry(const struct RahmanMatrix *m,
                                      size_t row,
                                      size_t col,
                                      char **out);

/**
 * Entry rounded to the nearest double in `*out`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum RahmanStatus rahman_matrix_entry_f64(const struct RahmanMatrix *m,
                                          size_t row,
                                          size_t col,
                                          double *out);

/**
 * Canonical JSON of the matrix with its state ordering; null on a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
char *rahman_matrix_to_json(const struct RahmanMatrix *m);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void rahman_matrix_free(struct RahmanMatrix *m);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void rahman_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAHMAN_H */
