#ifndef CONGRUENCE_H
#define CONGRUENCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Nonzero values above 3 are ABI misuse.
 */
typedef enum CongruenceStatus {
  CONGRUENCE_STATUS_OK = 0,
  /**
   * A check ran and failed.
   */
  CONGRUENCE_STATUS_FAIL = 1,
  /**
   * Budget or precision ran out.
   */
  CONGRUENCE_STATUS_INCONCLUSIVE = 2,
  /**
   * Bad arguments, bad spec, or an unsupported request.
   */
  CONGRUENCE_STATUS_USAGE = 3,
  CONGRUENCE_STATUS_NULL_POINTER = 4,
  CONGRUENCE_STATUS_INVALID_UTF8 = 5,
  CONGRUENCE_STATUS_PANIC = 6,
} CongruenceStatus;

/**
 * A p-adic field.
 */
typedef struct CongruenceContext CongruenceContext;

/**
 * A loaded spec.
 */
typedef struct CongruenceSpec CongruenceSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or NULL. The
 * pointer stays valid until the next call on this thread.
 */
const char *congruence_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void congruence_string_free(char *s);

/**
 * Parses and validates spec text. `precision` 0 keeps the file's values.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum CongruenceStatus congruence_spec_load(const char *text,
                                           uint32_t precision,
                                           struct CongruenceSpec **out);

/**
 * Prints a loaded spec back to TOML.
 *
 * # Safety
 * `spec` must be a live handle and `out` writable.
 */
enum CongruenceStatus congruence_spec_print(const struct CongruenceSpec *spec, char **out);

/**
 * # Safety
 * `spec` must be NULL or a handle from `congruence_spec_load`.
 */
void congruence_spec_free(struct CongruenceSpec *spec);

/**
 * Q_p with `precision` digits.
 *
 * # Safety
 * `out` must be writable.
 */
enum CongruenceStatus congruence_context_new(uint64_t p,
                                             uint32_t precision,
                                             struct CongruenceContext **out);

/**
 * # Safety
 * `ctx` must be NULL or a handle from `congruence_context_new`.
 */
void congruence_context_free(struct CongruenceContext *ctx);

/**
 * The valuation of a number literal. Zero at working precision is an
 * Inconclusive status.
 *
 * # Safety
 * `ctx` must be a live handle, `literal` NUL-terminated, `out` writable.
 */
enum CongruenceStatus congruence_valuation(const struct CongruenceContext *ctx,
                                           const char *literal,
                                           int64_t *out);

/**
 * γ(e, n) = e(n − 1) + 1.
 *
 * # Safety
 * `out` must be writable.
 */
enum CongruenceStatus congruence_gamma(uint32_t e, uint32_t n, uint32_t *out);

/**
 * Runs a command line as the `congruence` binary would (without the
 * program name) and returns its exit code. The JSON report goes to
 * `out_json`; errors, as JSON, to `out_err`. Either output may be NULL.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings.
 */
int32_t congruence_run(size_t argc, const char *const *argv, char **out_json, char **out_err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONGRUENCE_H */
