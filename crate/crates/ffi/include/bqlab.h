#ifndef BQLAB_H
#define BQLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum bq_status {
  BQ_STATUS_OK = 0,
  BQ_STATUS_NULL_POINTER = 1,
  BQ_STATUS_INVALID_UTF8 = 2,
  BQ_STATUS_PARSE = 3,
  BQ_STATUS_CAPACITY = 4,
  BQ_STATUS_CONTRACT = 5,
  BQ_STATUS_UNKNOWN_REGISTER = 6,
  BQ_STATUS_EXACTNESS = 7,
  BQ_STATUS_GARBAGE = 8,
  BQ_STATUS_ADAPTIVITY = 9,
  BQ_STATUS_IO = 10,
  BQ_STATUS_PANIC = 11,
} bq_status;

/**
 * Opaque counted oracle.
 */
typedef struct bq_oracle bq_oracle;

/**
 * Outcome of one algorithm run. `value` holds `width` bits, most
 * significant first.
 */
typedef struct bq_run {
  uint64_t value;
  uint32_t width;
  uint64_t queries;
  double probability;
} bq_run;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, nul-terminated version string.
 */
const char *bq_version(void);

/**
 * Message for the last failing call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *bq_last_error_message(void);

/**
 * Sets the process-wide qubit budget for states allocated afterwards.
 */
void bq_set_qubit_budget(size_t qubits);

/**
 * Oracle from a truth table such as `"0110"`.
 *
 * # Safety
 * `table` must be a nul-terminated string; `out` must be writable.
 */
enum bq_status bq_oracle_from_table(const char *table, struct bq_oracle **out);

/**
 * Oracle from the text of a spec file (`table`, `chain`, `dimacs`,
 * `innerproduct`). `dimacs` paths resolve against the working directory.
 *
 * # Safety
 * `spec` must be a nul-terminated string; `out` must be writable.
 */
enum bq_status bq_oracle_from_spec(const char *spec, struct bq_oracle **out);

/**
 * Oracle for `x -> <a, x>` over `width`-bit strings.
 *
 * # Safety
 * `out` must be writable.
 */
enum bq_status bq_oracle_inner_product(uint64_t a, size_t width, struct bq_oracle **out);

/**
 * # Safety
 * `oracle` must come from a `bq_oracle_*` constructor and not be used
 * afterwards. Null is ignored.
 */
void bq_oracle_free(struct bq_oracle *oracle);

/**
 * # Safety
 * `oracle` must be a live handle or null.
 */
size_t bq_oracle_query_width(const struct bq_oracle *oracle);

/**
 * Oracle-gate and classical queries made so far.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_oracle_count(const struct bq_oracle *oracle, uint64_t *out);

/**
 * Resets the counter; the previous value goes to `previous` unless it is null.
 *
 * # Safety
 * `oracle` must be a live handle; `previous` must be writable or null.
 */
enum bq_status bq_oracle_reset(struct bq_oracle *oracle, uint64_t *previous);

/**
 * One counted classical query.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_oracle_query(struct bq_oracle *oracle, uint64_t query, bool *out);

/**
 * `f(0) ^ f(1)` with one oracle gate on a one-bit oracle.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_deutsch_parity(struct bq_oracle *oracle, struct bq_run *out);

/**
 * `A(q0) ^ A(q1)` with one oracle gate.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_two_point_parity(struct bq_oracle *oracle,
                                   uint64_t q0,
                                   uint64_t q1,
                                   struct bq_run *out);

/**
 * XOR of the answers to `len` distinct queries, taken as consecutive
 * pairs; `len` must be even. Non-adaptive: the pairs are declared as a
 * plan before the first gate.
 *
 * # Safety
 * `oracle` must be a live handle; `queries` must point to `len` values;
 * `out` must be writable.
 */
enum bq_status bq_pairwise_parallel_parity(struct bq_oracle *oracle,
                                           const uint64_t *queries,
                                           size_t len,
                                           struct bq_run *out);

/**
 * Parity of a monotone chain oracle of length `2^(k+1) - 2` with `k` gates.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_chain_parity_search(struct bq_oracle *oracle, size_t len, struct bq_run *out);

/**
 * Classical binary-search baseline for the chain parity.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_classical_chain_parity(struct bq_oracle *oracle, size_t len, bool *out);

/**
 * Reads `a` from an oracle for `x -> <a, x>` with one gate.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_bv_extract(struct bq_oracle *oracle, struct bq_run *out);

/**
 * `f(z)` from one gate on an oracle for `{(z, y) : <f(z), y> = 1}` whose
 * queries are `z_width + out_width` bits, `z` first.
 *
 * # Safety
 * `oracle` must be a live handle; `out` must be writable.
 */
enum bq_status bq_extract_function(struct bq_oracle *oracle,
                                   size_t z_width,
                                   size_t out_width,
                                   uint64_t z,
                                   struct bq_run *out);

/**
 * Query-count table for `k = 1..=max_k` as a JSON array of reports.
 *
 * # Safety
 * `out` must be writable; the string is freed with `bq_string_free`.
 */
enum bq_status bq_table_json(size_t max_k, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void bq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BQLAB_H */
