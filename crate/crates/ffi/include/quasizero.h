#ifndef QUASIZERO_H
#define QUASIZERO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QzStatus {
  QZ_STATUS_OK = 0,
  QZ_STATUS_NULL_POINTER = 1,
  QZ_STATUS_INVALID_ARGUMENT = 2,
  QZ_STATUS_PARSE = 3,
  QZ_STATUS_NUMERICAL = 4,
  QZ_STATUS_OUT_OF_RANGE = 5,
  QZ_STATUS_PANIC = 6,
} QzStatus;

typedef enum QzVerdict {
  QZ_VERDICT_SINE_PRODUCT = 0,
  QZ_VERDICT_NOT_SINE_PRODUCT = 1,
  QZ_VERDICT_INCONCLUSIVE = 2,
} QzVerdict;

/*
 Outcome of [`qz_factor`].
 */
typedef struct QzFactorResult QzFactorResult;

/*
 Exponential polynomial handle.
 */
typedef struct QzPolynomial QzPolynomial;

/*
 Zeros found in a rectangle.
 */
typedef struct QzZeroSet QzZeroSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer stays
 valid until the next call into this library on the same thread.
 */
const char *qz_last_error(void);

/*
 Builds a polynomial from `n` terms `(omega[k], re[k] + i im[k])`.

 # Safety
 `omega`, `re` and `im` must each point to `n` readable doubles; `out` must be writable.
 */
enum QzStatus qz_polynomial_new(const double *omega,
                                const double *re,
                                const double *im,
                                uintptr_t n,
                                struct QzPolynomial **out);

/*
 Parses `{"terms": [...]}` or a sine product `{"C": [re, im], "a": ..., "factors": [...]}`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QzStatus qz_polynomial_from_json(const char *json, struct QzPolynomial **out);

/*
 # Safety
 `p` must be null or a handle from this library not yet freed.
 */
void qz_polynomial_free(struct QzPolynomial *p);

/*
 Number of terms; 0 for a null handle.

 # Safety
 `p` must be null or a live handle.
 */
uintptr_t qz_polynomial_len(const struct QzPolynomial *p);

/*
 # Safety
 `p` must be a live handle; `out_re` and `out_im` must be writable.
 */
enum QzStatus qz_polynomial_evaluate(const struct QzPolynomial *p,
                                     double re,
                                     double im,
                                     double *out_re,
                                     double *out_im);

/*
 Locates all zeros in `[x0, x1] x [y0, y1]` to tolerance `tol`.

 # Safety
 `p` must be a live handle; `out` must be writable.
 */
enum QzStatus qz_find_zeros(const struct QzPolynomial *p,
                            double x0,
                            double x1,
                            double y0,
                            double y1,
                            double tol,
                            struct QzZeroSet **out);

/*
 Number of distinct zeros.

 # Safety
 `z` must be null or a live handle.
 */
uintptr_t qz_zero_set_len(const struct QzZeroSet *z);

/*
 Zeros counted with multiplicity.

 # Safety
 `z` must be null or a live handle.
 */
uintptr_t qz_zero_set_count(const struct QzZeroSet *z);

/*
 Location and multiplicity of zero `i`, zeros sorted by real part.

 # Safety
 `z` must be a live handle; the outputs must be writable.
 */
enum QzStatus qz_zero_set_get(const struct QzZeroSet *z,
                              uintptr_t i,
                              double *out_re,
                              double *out_im,
                              uint32_t *out_mult);

/*
 # Safety
 `z` must be null or a handle from this library not yet freed.
 */
void qz_zero_set_free(struct QzZeroSet *z);

/*
 Runs the full factorization. `config_json` may be null for defaults or
 hold a JSON object with any of the `FactorConfig` fields.

 # Safety
 `p` must be a live handle, `config_json` null or NUL-terminated, `out` writable.
 */
enum QzStatus qz_factor(const struct QzPolynomial *p,
                        const char *config_json,
                        struct QzFactorResult **out);

/*
 # Safety
 `r` must be a live handle.
 */
enum QzVerdict qz_factor_verdict(const struct QzFactorResult *r);

/*
 Result as a JSON string owned by the caller; release with [`qz_string_free`].
 Null for a null handle.

 # Safety
 `r` must be null or a live handle.
 */
char *qz_factor_json(const struct QzFactorResult *r);

/*
 # Safety
 `r` must be null or a handle from this library not yet freed.
 */
void qz_factor_result_free(struct QzFactorResult *r);

/*
 # Safety
 `s` must be null or a string returned by this library not yet freed.
 */
void qz_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUASIZERO_H */
