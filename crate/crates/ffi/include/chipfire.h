#ifndef CHIPFIRE_H
#define CHIPFIRE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_ARGUMENT = 2,
  CF_STATUS_INVALID_UTF8 = 3,
  CF_STATUS_SIZE_GUARD = 4,
  CF_STATUS_INVALID_PLAN = 5,
  CF_STATUS_PANIC = 6,
} CfStatus;

/**
 * A permutation of `1..=n`.
 */
typedef struct CfPermutation CfPermutation;

/**
 * Result of an extremal search.
 */
typedef struct CfReport CfReport;

/**
 * A tuple-selection strategy.
 */
typedef struct CfStrategy CfStrategy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *cf_last_error(void);

/**
 * Library version as a static string.
 */
const char *cf_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void cf_string_free(char *s);

/**
 * Decimal k-dimensional Catalan number `C(k, m)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_kd_catalan(uint32_t k, uint64_t m, char **out);

/**
 * Decimal number of stable configurations for `k^ell` chips.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_kappa(uint32_t k, uint32_t ell, char **out);

/**
 * Parses `identity`, `unbundle`, `random:<seed>` or `embed:<n>`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CfStatus cf_strategy_from_name(const char *name, struct CfStrategy **out);

/**
 * Parses an indented composition spec.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CfStatus cf_strategy_from_compose_spec(const char *text, struct CfStrategy **out);

/**
 * # Safety
 * `s` must be null or a pointer from `cf_strategy_*`, freed at most once.
 */
void cf_strategy_free(struct CfStrategy *s);

/**
 * Stabilizes `k^ell` chips from the root under `strategy`.
 *
 * # Safety
 * `strategy` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_simulate(uint32_t k,
                          uint32_t ell,
                          const struct CfStrategy *strategy,
                          struct CfPermutation **out);

/**
 * The digit-reversal permutation of `0..k^ell`, shifted to start at 1.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_digit_reversal(uint32_t k, uint32_t ell, struct CfPermutation **out);

/**
 * Validates and copies `len` values as a permutation.
 *
 * # Safety
 * `values` must point to `len` readable values; `out` must be valid for writes.
 */
enum CfStatus cf_permutation_new(const uint32_t *values, size_t len, struct CfPermutation **out);

/**
 * # Safety
 * `p` must be a live handle.
 */
size_t cf_permutation_len(const struct CfPermutation *p);

/**
 * Pointer to the values, valid while `p` is alive.
 *
 * # Safety
 * `p` must be a live handle.
 */
const uint32_t *cf_permutation_data(const struct CfPermutation *p);

/**
 * # Safety
 * `p` must be null or a handle from this library, freed at most once.
 */
void cf_permutation_free(struct CfPermutation *p);

/**
 * Inversion count of a permutation given as raw values.
 *
 * # Safety
 * `values` must point to `len` readable values; `out` must be valid for writes.
 */
enum CfStatus cf_inversions(const uint32_t *values, size_t len, uint64_t *out);

/**
 * Length of the longest strictly decreasing subsequence.
 *
 * # Safety
 * `values` must point to `len` readable values; `out` must be valid for writes.
 */
enum CfStatus cf_lds(const uint32_t *values, size_t len, uint64_t *out);

/**
 * Number of stable configurations, by exhaustive enumeration.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_count_stable(uint32_t k, uint32_t ell, size_t workers, uint64_t *out);

/**
 * Maximum inversion count over all stable configurations.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_max_inversions(uint32_t k, uint32_t ell, size_t workers, struct CfReport **out);

/**
 * Longest decreasing subsequence over all stable configurations.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_max_lds(uint32_t k,
                         uint32_t ell,
                         size_t workers,
                         bool prune,
                         struct CfReport **out);

/**
 * Compares the LDS maximum with the digit-reversal value. A violation is
 * reported through [`cf_report_violated`], not as an error.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_verify_conjecture(uint32_t k, uint32_t ell, size_t workers, struct CfReport **out);

/**
 * # Safety
 * `r` must be a live handle.
 */
uint64_t cf_report_value(const struct CfReport *r);

/**
 * # Safety
 * `r` must be a live handle.
 */
uint64_t cf_report_closed_form(const struct CfReport *r);

/**
 * # Safety
 * `r` must be a live handle.
 */
uint64_t cf_report_explored(const struct CfReport *r);

/**
 * # Safety
 * `r` must be a live handle.
 */
uint64_t cf_report_pruned(const struct CfReport *r);

/**
 * # Safety
 * `r` must be a live handle.
 */
bool cf_report_violated(const struct CfReport *r);

/**
 * Copies the witness into a new permutation handle.
 *
 * # Safety
 * `r` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_report_witness(const struct CfReport *r, struct CfPermutation **out);

/**
 * # Safety
 * `r` must be null or a handle from this library, freed at most once.
 */
void cf_report_free(struct CfReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHIPFIRE_H */
