#ifndef SPACELAB_H
#define SPACELAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; 2 and 3 match the CLI exit codes.
 */
typedef enum SpacelabStatus {
  SPACELAB_STATUS_OK = 0,
  SPACELAB_STATUS_INTERNAL = 1,
  SPACELAB_STATUS_VALIDATION = 2,
  SPACELAB_STATUS_BUDGET_EXHAUSTED = 3,
  SPACELAB_STATUS_NULL_POINTER = 4,
} SpacelabStatus;

/**
 * Opaque handle to a materialized view of `P`.
 */
typedef struct SpacelabView SpacelabView;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `spec_json` and materializes it on `[1..horizon]`.
 *
 * # Safety
 * `spec_json` must be a nul-terminated string and `out` a valid pointer.
 */
enum SpacelabStatus spacelab_view_new(const char *spec_json,
                                      size_t horizon,
                                      struct SpacelabView **out);

/**
 * # Safety
 * `view` must come from [`spacelab_view_new`] and not be used afterwards.
 */
void spacelab_view_free(struct SpacelabView *view);

/**
 * # Safety
 * `view` must be a live handle or null (returns 0).
 */
size_t spacelab_view_horizon(const struct SpacelabView *view);

/**
 * # Safety
 * `view` must be a live handle and `out` a valid pointer.
 */
enum SpacelabStatus spacelab_member(const struct SpacelabView *view, size_t n, bool *out);

/**
 * Writes `c(n)` as a decimal string to `*out`.
 *
 * # Safety
 * `view` must be a live handle and `out` a valid pointer.
 */
enum SpacelabStatus spacelab_count_words(const struct SpacelabView *view,
                                         size_t n,
                                         uint64_t budget,
                                         char **out);

/**
 * Writes `ω(n)` and its least witness word (`0`/`1` characters).
 *
 * # Safety
 * `view` must be a live handle; `omega` and `witness` valid pointers.
 */
enum SpacelabStatus spacelab_max_ones(const struct SpacelabView *view,
                                      size_t n,
                                      uint64_t budget,
                                      size_t *omega,
                                      char **witness);

/**
 * Writes the witness JSON, or `null` when no chain exists below `bound`.
 *
 * # Safety
 * `view` must be a live handle and `out` a valid pointer.
 */
enum SpacelabStatus spacelab_find_delta_chain(const struct SpacelabView *view,
                                              size_t depth,
                                              size_t bound,
                                              uint64_t budget,
                                              char **out);

/**
 * Runs a named experiment; `params_json` may be null for the defaults.
 * A budget exhaustion inside the experiment is reported through the
 * verdict, not the status.
 *
 * # Safety
 * `id` must be a nul-terminated string, `params_json` null or one, and
 * `out` a valid pointer.
 */
enum SpacelabStatus spacelab_run_experiment(const char *id,
                                            const char *params_json,
                                            uint64_t budget,
                                            char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void spacelab_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *spacelab_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *spacelab_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPACELAB_H */
