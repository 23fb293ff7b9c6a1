#ifndef DECOMP_LAB_H
#define DECOMP_LAB_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Search outcome, numbered like the command-line exit codes.
 */
typedef enum DlOutcome {
  DL_OUTCOME_FOUND = 0,
  DL_OUTCOME_NONE = 1,
  DL_OUTCOME_TIMEOUT = 2,
} DlOutcome;

/**
 * Status of a call.
 */
typedef enum DlStatus {
  DL_STATUS_OK = 0,
  DL_STATUS_NULL_POINTER = 1,
  DL_STATUS_INVALID_UTF8 = 2,
  DL_STATUS_PARSE = 3,
  DL_STATUS_INVALID_INPUT = 4,
  DL_STATUS_BUDGET_EXCEEDED = 5,
  DL_STATUS_PANIC = 6,
} DlStatus;

/**
 * A decomposition certificate.
 */
typedef struct DlCertificate DlCertificate;

/**
 * A pattern family.
 */
typedef struct DlFamily DlFamily;

/**
 * A host structure.
 */
typedef struct DlHost DlHost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *dl_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void dl_string_free(char *s);

/**
 * Parses a host document (`type` hypergraph, coloured, digraph or multidigraph).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DlStatus dl_host_from_json(const char *json, struct DlHost **out);

/**
 * The complete `r`-graph on `n` vertices.
 *
 * # Safety
 * `out` must be writable.
 */
enum DlStatus dl_host_complete(uint32_t n, uint32_t r, struct DlHost **out);

/**
 * # Safety
 * `h` must come from this library and not be freed twice.
 */
void dl_host_free(struct DlHost *h);

/**
 * Parses one pattern or an array of patterns.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DlStatus dl_family_from_json(const char *json, struct DlFamily **out);

/**
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void dl_family_free(struct DlFamily *f);

/**
 * # Safety
 * `c` must come from this library and not be freed twice.
 */
void dl_certificate_free(struct DlCertificate *c);

/**
 * Serializes a certificate; release the result with [`dl_string_free`].
 *
 * # Safety
 * `c` must be a live certificate; `out` must be writable.
 */
enum DlStatus dl_certificate_to_json(const struct DlCertificate *c, char **out);

/**
 * Parses a certificate document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DlStatus dl_certificate_from_json(const char *json, struct DlCertificate **out);

/**
 * Searches for a decomposition. Partition documents may both be null for no partite
 * constraint. `timeout_ms == 0` means no deadline and `budget == 0` the default budget.
 * `cert_out` receives a certificate only when the outcome is found, else null.
 *
 * # Safety
 * Handles must be live; strings NUL-terminated or null; outputs writable.
 */
enum DlStatus dl_solve(const struct DlHost *host,
                       const struct DlFamily *family,
                       const char *pattern_partition_json,
                       const char *host_partition_json,
                       uint64_t timeout_ms,
                       uint64_t budget,
                       enum DlOutcome *outcome_out,
                       struct DlCertificate **cert_out);

/**
 * Counts decompositions; the decimal count is written to `count_out`.
 *
 * # Safety
 * Handles must be live; strings NUL-terminated or null; outputs writable.
 */
enum DlStatus dl_count(const struct DlHost *host,
                       const struct DlFamily *family,
                       const char *pattern_partition_json,
                       const char *host_partition_json,
                       uint64_t timeout_ms,
                       uint64_t budget,
                       char **count_out);

/**
 * Recomputes the certificate's footprints against the host.
 *
 * # Safety
 * Handles must be live; strings NUL-terminated or null; `valid_out` writable.
 */
enum DlStatus dl_verify(const struct DlHost *host,
                        const struct DlFamily *family,
                        const char *pattern_partition_json,
                        const char *host_partition_json,
                        const struct DlCertificate *cert,
                        bool *valid_out);

/**
 * Steiner divisibility: `binom(q-i, r-i) | λ binom(n-i, r-i)` for all `i < r`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DlStatus dl_steiner_divisible(uint64_t n, uint64_t q, uint64_t r, uint64_t lambda, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DECOMP_LAB_H */
