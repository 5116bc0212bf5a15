#ifndef SYMSEP_H
#define SYMSEP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SymsepStatus {
  SYMSEP_STATUS_OK = 0,
  SYMSEP_STATUS_NULL_POINTER = 1,
  SYMSEP_STATUS_INVALID_UTF8 = 2,
  SYMSEP_STATUS_PARSE = 3,
  SYMSEP_STATUS_DOMAIN = 4,
  SYMSEP_STATUS_CONFIG = 5,
  SYMSEP_STATUS_IO = 6,
  SYMSEP_STATUS_BUFFER_TOO_SMALL = 7,
  SYMSEP_STATUS_PANIC = 8,
} SymsepStatus;

/**
 * Reports of one `verify` run together with their JSON rendering.
 */
typedef struct SymsepReport SymsepReport;

/**
 * A parsed Staeckel system.
 */
typedef struct SymsepStackel SymsepStackel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *symsep_last_error(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *symsep_version(void);

/**
 * Parses a Staeckel system from the text data format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SymsepStatus symsep_stackel_parse(const char *text, struct SymsepStackel **out);

/**
 * Loads one of the systems shipped with the library by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SymsepStatus symsep_stackel_shipped(const char *name, struct SymsepStackel **out);

/**
 * # Safety
 * `handle` must come from this library and not be used afterwards.
 */
void symsep_stackel_free(struct SymsepStackel *handle);

/**
 * Number of coordinates of the system.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum SymsepStatus symsep_stackel_dim(const struct SymsepStackel *handle, size_t *out);

/**
 * Whether every entry of row `i` of the Staeckel matrix depends on `x_i` only.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum SymsepStatus symsep_stackel_is_separated(const struct SymsepStackel *handle, bool *out);

/**
 * The constants `c_1..c_m` at the phase point `(x, p)`; all three arrays
 * have length `len`, which must equal the system's dimension.
 *
 * # Safety
 * `x`, `p` and `out` must point to `len` doubles.
 */
enum SymsepStatus symsep_stackel_constants(const struct SymsepStackel *handle,
                                           const double *x,
                                           const double *p,
                                           size_t len,
                                           double *out);

/**
 * Runs one verification check, or all of them for `"all"`, with default
 * tolerances and sample counts.
 *
 * # Safety
 * `check_id` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SymsepStatus symsep_verify(const char *check_id, uint64_t seed, struct SymsepReport **out);

/**
 * True when no check in the report failed.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum SymsepStatus symsep_report_passed(const struct SymsepReport *handle, bool *out);

/**
 * The JSON report, owned by the handle.
 *
 * # Safety
 * `handle` must be valid; the string lives until the handle is freed.
 */
const char *symsep_report_json(const struct SymsepReport *handle);

/**
 * # Safety
 * `handle` must come from this library and not be used afterwards.
 */
void symsep_report_free(struct SymsepReport *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMSEP_H */
