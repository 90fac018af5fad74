#ifndef MIXOA_H
#define MIXOA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum MixoaStatus {
  MIXOA_STATUS_OK = 0,
  MIXOA_STATUS_NULL_POINTER = 1,
  MIXOA_STATUS_USAGE = 2,
  MIXOA_STATUS_OVERFLOW = 3,
  MIXOA_STATUS_CAPACITY = 4,
  MIXOA_STATUS_UNSUPPORTED = 5,
  MIXOA_STATUS_PARSE = 6,
  MIXOA_STATUS_MISMATCH = 7,
  MIXOA_STATUS_INVALID_GROUP = 8,
  MIXOA_STATUS_CATALOG = 9,
  MIXOA_STATUS_INTERNAL = 10,
  MIXOA_STATUS_IO = 11,
  MIXOA_STATUS_INVALID_UTF8 = 12,
  MIXOA_STATUS_PANIC = 13,
} MixoaStatus;

/**
 * Which fill rule to use for the last row of a construction.
 */
typedef enum MixoaLastRow {
  MIXOA_LAST_ROW_DIGIT_SUM = 0,
  MIXOA_LAST_ROW_ALTERNATING = 1,
} MixoaLastRow;

/**
 * Opaque array handle.
 */
typedef struct MixoaArray MixoaArray;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mixoa_version(void);

/**
 * Message of the last failure on this thread, or null if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mixoa_last_error(void);

/**
 * Writes `L_1..L_k` into `levels_out` (room for `k` values) and the
 * threshold into `d_out`.
 *
 * # Safety
 * `orders` must point to `k` values and `levels_out` to room for `k`.
 */
enum MixoaStatus mixoa_bounds(const uint64_t *orders,
                              size_t k,
                              uint64_t *levels_out,
                              size_t *d_out);

/**
 * Builds the strength `k - 1` array for `orders`.
 *
 * # Safety
 * `orders` must point to `k` values; `out` must be writable.
 */
enum MixoaStatus mixoa_construct(const uint64_t *orders,
                                 size_t k,
                                 enum MixoaLastRow last_row,
                                 struct MixoaArray **out);

/**
 * Parses the text array format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum MixoaStatus mixoa_array_parse(const char *text, struct MixoaArray **out);

/**
 * Renders the array in the text format. Free the result with
 * [`mixoa_string_free`].
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
enum MixoaStatus mixoa_array_to_text(const struct MixoaArray *array, char **out);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void mixoa_string_free(char *s);

/**
 * Number of factors, 0 for a null handle.
 *
 * # Safety
 * `array` must be a live handle or null.
 */
size_t mixoa_array_k(const struct MixoaArray *array);

/**
 * Number of runs, 0 for a null handle.
 *
 * # Safety
 * `array` must be a live handle or null.
 */
size_t mixoa_array_size(const struct MixoaArray *array);

/**
 * Symbol index of factor `factor` in run `run`.
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
enum MixoaStatus mixoa_array_entry(const struct MixoaArray *array,
                                   size_t factor,
                                   size_t run,
                                   size_t *out);

/**
 * Whether the array has strength `t`.
 *
 * # Safety
 * `array` must be a live handle; `holds` must be writable.
 */
enum MixoaStatus mixoa_verify_strength(const struct MixoaArray *array, size_t t, bool *holds);

/**
 * Largest strength the array has, 0 for a null handle.
 *
 * # Safety
 * `array` must be a live handle or null.
 */
size_t mixoa_max_strength(const struct MixoaArray *array);

/**
 * Whether the counting function is constant on conjugacy classes of the
 * array's own factor groups.
 *
 * # Safety
 * `array` must be a live handle; `holds` must be writable.
 */
enum MixoaStatus mixoa_verify_conjugacy(const struct MixoaArray *array, bool *holds);

/**
 * # Safety
 * `array` must come from this library, or be null. It must not be used
 * afterwards.
 */
void mixoa_array_free(struct MixoaArray *array);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIXOA_H */
