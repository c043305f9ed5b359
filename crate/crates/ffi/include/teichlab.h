#ifndef TEICHLAB_H
#define TEICHLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_UTF8 = 2,
  TL_STATUS_PARSE = 3,
  TL_STATUS_INVALID_ARGUMENT = 4,
  TL_STATUS_ZERO_ELEMENT = 5,
  TL_STATUS_MISMATCH = 6,
  TL_STATUS_UNSUPPORTED = 7,
  TL_STATUS_NUMERICAL = 8,
  TL_STATUS_INTERNAL = 9,
} TlStatus;

/**
 * An arithmeticoid.
 */
typedef struct TlArithmeticoid TlArithmeticoid;

/**
 * An element of a base field.
 */
typedef struct TlElement TlElement;

/**
 * A base field.
 */
typedef struct TlField TlField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tl_version(void);

/**
 * Short description of a status code as a static NUL-terminated string.
 */
const char *tl_status_name(enum TlStatus status);

/**
 * Message of the last failure on this thread; empty after a success.
 *
 * # Safety
 * `buf` is null or points to `cap` writable bytes.
 */
size_t tl_last_error(char *buf, size_t cap);

/**
 * Parse `Q`, `Q(i)`, `Q(sqrt(-d))`.
 *
 * # Safety
 * `spec` is a NUL-terminated string; `out` is writable.
 */
enum TlStatus tl_field_parse(const char *spec, struct TlField **out);

/**
 * # Safety
 * `field` is null or came from `tl_field_parse` and is not used afterwards.
 */
void tl_field_free(struct TlField *field);

/**
 * Parse an element such as `3/4`, `2+i`, `1-2*sqrt(-5)`.
 *
 * # Safety
 * `field` is a live handle, `value` NUL-terminated, `out` writable.
 */
enum TlStatus tl_element_parse(const struct TlField *field,
                               const char *value,
                               struct TlElement **out);

/**
 * # Safety
 * `x` is a live handle; `buf` is null or has `cap` writable bytes.
 */
size_t tl_element_to_string(const struct TlElement *x, char *buf, size_t cap);

/**
 * # Safety
 * `x` is null or came from `tl_element_parse` and is not used afterwards.
 */
void tl_element_free(struct TlElement *x);

/**
 * The classical product formula for `x`: the floating residual and whether
 * the exact per-prime exponents cancel.
 *
 * # Safety
 * `x` is a live handle; the out-pointers are writable.
 */
enum TlStatus tl_product_formula(const struct TlElement *x, double *residual, bool *exact);

/**
 * The standard arithmeticoid of a field.
 *
 * # Safety
 * `field` is a live handle; `out` is writable.
 */
enum TlStatus tl_arithmeticoid_standard(const struct TlField *field, struct TlArithmeticoid **out);

/**
 * Read an arithmeticoid from its JSON form.
 *
 * # Safety
 * `json` is NUL-terminated; `out` is writable.
 */
enum TlStatus tl_arithmeticoid_from_json(const char *json, struct TlArithmeticoid **out);

/**
 * JSON form of an arithmeticoid.
 *
 * # Safety
 * `y` is a live handle; `buf` is null or has `cap` writable bytes.
 */
size_t tl_arithmeticoid_to_json(const struct TlArithmeticoid *y, char *buf, size_t cap);

/**
 * `φ^m(y)`.
 *
 * # Safety
 * `y` is a live handle; `out` is writable.
 */
enum TlStatus tl_arithmeticoid_frobenius(const struct TlArithmeticoid *y,
                                         int64_t m,
                                         struct TlArithmeticoid **out);

/**
 * `x · y` under the action of the multiplicative group.
 *
 * # Safety
 * `x` and `y` are live handles; `out` is writable.
 */
enum TlStatus tl_arithmeticoid_act(const struct TlElement *x,
                                   const struct TlArithmeticoid *y,
                                   struct TlArithmeticoid **out);

/**
 * # Safety
 * `y` is null or an arithmeticoid handle not used afterwards.
 */
void tl_arithmeticoid_free(struct TlArithmeticoid *y);

/**
 * Distance between two arithmeticoids.
 *
 * # Safety
 * `a` and `b` are live handles; `out` is writable.
 */
enum TlStatus tl_distance(const struct TlArithmeticoid *a,
                          const struct TlArithmeticoid *b,
                          double *out);

/**
 * Height of the projective point `(coords[0] : … : coords[n-1])` relative to `y`.
 *
 * # Safety
 * `y` is a live handle, `coords` points to `n` live element handles and
 * `out` is writable.
 */
enum TlStatus tl_height(const struct TlArithmeticoid *y,
                        const struct TlElement *const *coords,
                        size_t n,
                        double *out);

/**
 * Height of a lift of `[[m0, m1], [m2, m3]] ∈ SL2(ℝ)` with the given winding,
 * sampled on `grid` points, with its error bound.
 *
 * # Safety
 * `matrix` points to 4 doubles in row-major order; the out-pointers are writable.
 */
enum TlStatus tl_cover_height(const double *matrix,
                              int64_t winding,
                              size_t grid,
                              double *value,
                              double *error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEICHLAB_H */
