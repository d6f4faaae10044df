#ifndef AWNEV_H
#define AWNEV_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The numeric values of the three error families match the
 * exit codes of the `awnev` command.
 */
typedef enum AwnevStatus {
  AWNEV_STATUS_OK = 0,
  AWNEV_STATUS_NULL_POINTER = 1,
  /**
   * The expression did not parse or compile.
   */
  AWNEV_STATUS_PARSE = 2,
  /**
   * A numerical routine failed or a residual check did not pass.
   */
  AWNEV_STATUS_NUMERIC = 3,
  /**
   * Invalid parameters or violated preconditions.
   */
  AWNEV_STATUS_PRECONDITION = 4,
  AWNEV_STATUS_INVALID_UTF8 = 5,
  AWNEV_STATUS_PANIC = 6,
} AwnevStatus;

/**
 * A compiled expression bound to its `q`.
 */
typedef struct AwnevExpr AwnevExpr;

typedef struct AwnevComplex {
  double re;
  double im;
} AwnevComplex;

typedef struct AwnevCharacteristic {
  double r;
  double m;
  int64_t n;
  double big_n;
  double t;
} AwnevCharacteristic;

typedef struct AwnevAsymSummary {
  double max_error;
  double bound;
  uintptr_t violations;
} AwnevAsymSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Compiles `src` (NUL-terminated UTF-8) against `q`. On success `*out`
 * receives a handle to release with [`awnev_expr_free`].
 *
 * # Safety
 * `src` must be a valid C string and `out` a writable pointer.
 */
enum AwnevStatus awnev_expr_compile(const char *src, struct AwnevComplex q, struct AwnevExpr **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from [`awnev_expr_compile`] and not be freed twice.
 */
void awnev_expr_free(struct AwnevExpr *h);

/**
 * `f(x)`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum AwnevStatus awnev_expr_eval(const struct AwnevExpr *h,
                                 struct AwnevComplex x,
                                 struct AwnevComplex *out);

/**
 * `D_q^order f(x)`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum AwnevStatus awnev_expr_dq(const struct AwnevExpr *h,
                               uintptr_t order,
                               struct AwnevComplex x,
                               struct AwnevComplex *out);

/**
 * Proximity, pole counts and characteristic on `|x| = r`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum AwnevStatus awnev_expr_characteristic(const struct AwnevExpr *h,
                                           double r,
                                           struct AwnevCharacteristic *out);

/**
 * Largest `|D_q f| / max(1, |f|)` over `count` sample points.
 *
 * # Safety
 * `h` must be a live handle, `points` must hold `count` values, `out` writable.
 */
enum AwnevStatus awnev_expr_kernel_residual(const struct AwnevExpr *h,
                                            const struct AwnevComplex *points,
                                            uintptr_t count,
                                            double *out);

/**
 * Asymptotic log-modulus check of `(a z, a/z; q)∞` on `samples` points.
 *
 * # Safety
 * `out` must be writable.
 */
enum AwnevStatus awnev_asym_check(struct AwnevComplex a,
                                  struct AwnevComplex q,
                                  uintptr_t samples,
                                  struct AwnevAsymSummary *out);

/**
 * Message for the last failure on this thread, or null when the last call
 * succeeded. Valid until the next call on the same thread.
 */
const char *awnev_last_error_message(void);

/**
 * Library version as a static C string.
 */
const char *awnev_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AWNEV_H */
