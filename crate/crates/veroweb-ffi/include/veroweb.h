#ifndef VEROWEB_H
#define VEROWEB_H

/* Generated by cbindgen from crates/veroweb-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum VwStatus {
  VW_STATUS_OK = 0,
  VW_STATUS_NULL_ARGUMENT = 1,
  VW_STATUS_INVALID_UTF8 = 2,
  /**
   * Unknown command or bad command-line arguments.
   */
  VW_STATUS_USAGE = 3,
  /**
   * Malformed input document; the message carries a JSON pointer.
   */
  VW_STATUS_SCHEMA = 4,
  /**
   * Input parsed but violates a hypothesis of the computation.
   */
  VW_STATUS_PRECONDITION = 5,
  VW_STATUS_IO = 6,
  VW_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  VW_STATUS_INTERNAL = 8,
} VwStatus;

/**
 * A parsed admissible couple (J, W) over the rationals.
 */
typedef struct VwCouple VwCouple;

/**
 * A finished report: exit status (0 pass, 1 fail) and JSON body.
 */
typedef struct VwReport VwReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *vw_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *vw_last_error(void);

/**
 * Runs the command line `veroweb argv[0] … argv[argc-1]` without printing.
 * `--out` is honoured as in the binary.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `out` must be writable.
 */
enum VwStatus vw_run_args(size_t argc, const char *const *argv, struct VwReport **out);

/**
 * Runs a document command ("curve build", "couple normalize", "pencil
 * classify", "web verify", "web compat") on JSON text, over the rationals.
 * `samples` is used by web verify only.
 *
 * # Safety
 * `command` and `json` must be NUL-terminated; `out` must be writable.
 */
enum VwStatus vw_run_document(const char *command,
                              const char *json,
                              int32_t order,
                              uint64_t seed,
                              size_t samples,
                              struct VwReport **out);

/**
 * 0 when the checked property holds, 1 when it fails, -1 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
int32_t vw_report_exit_code(const struct VwReport *report);

/**
 * Compact JSON of the report, borrowed from the handle.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
const char *vw_report_json(const struct VwReport *report);

/**
 * The report rendered as `key: value` lines; free with [`vw_string_free`].
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
char *vw_report_text(const struct VwReport *report);

/**
 * # Safety
 * `report` must be NULL or a handle not yet freed.
 */
void vw_report_free(struct VwReport *report);

/**
 * Parses a `veroweb/couple@1` document and checks admissibility.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum VwStatus vw_couple_parse(const char *json, struct VwCouple **out);

/**
 * Ambient dimension n, or 0 for NULL.
 *
 * # Safety
 * `couple` must be NULL or a live handle.
 */
size_t vw_couple_dim(const struct VwCouple *couple);

/**
 * Copies the characteristic numbers (nonincreasing) into `buf`. `len`
 * always receives the count; if it exceeds `cap` nothing is copied and
 * `VW_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `couple` must be a live handle, `buf` writable for `cap` entries and
 * `len` writable.
 */
enum VwStatus vw_couple_char_numbers(const struct VwCouple *couple,
                                     size_t *buf,
                                     size_t cap,
                                     size_t *len);

/**
 * The Veronese curve of the couple, normalised so that its leading
 * coefficient is the wedge of the given basis of W, as JSON (coefficients
 * in ascending powers of t). Free with [`vw_string_free`].
 *
 * # Safety
 * `couple` must be a live handle; `out` must be writable.
 */
enum VwStatus vw_couple_curve_json(const struct VwCouple *couple, char **out);

/**
 * # Safety
 * `couple` must be NULL or a handle not yet freed.
 */
void vw_couple_free(struct VwCouple *couple);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void vw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VEROWEB_H */
