/* SPDX-License-Identifier: Apache-2.0 */

#ifndef RFS_H
#define RFS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RfsStatus {
  RFS_STATUS_OK = 0,
  RFS_STATUS_NULL_POINTER = 1,
  RFS_STATUS_INVALID_ARGUMENT = 2,
  RFS_STATUS_PARSE = 3,
  RFS_STATUS_DOMAIN = 4,
  RFS_STATUS_TOO_LARGE = 5,
  RFS_STATUS_UNSOLVED = 6,
  RFS_STATUS_PANIC = 7,
} RfsStatus;

typedef enum RfsMode {
  RFS_MODE_FOUR_QUERY = 0,
  RFS_MODE_KICKBACK = 1,
} RfsMode;

/**
 * Opaque inner function.
 */
typedef struct RfsFunction RfsFunction;

/**
 * Opaque problem instance.
 */
typedef struct RfsInstance RfsInstance;

/**
 * Opaque query-counting oracle over its own copy of an instance.
 */
typedef struct RfsOracle RfsOracle;

/**
 * Outcome of an exact quantum simulation.
 */
typedef struct RfsSimReport {
  bool answer;
  double prob_correct;
  double prob_incorrect;
  uint64_t oracle_queries;
  double ancilla_residual;
  size_t qubits_used;
} RfsSimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *rfs_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *rfs_version(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void rfs_string_free(char *s);

/**
 * Parse a function spec such as `or:2` or `table-hex:2:E`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out_fn` must be writable.
 */
enum RfsStatus rfs_function_parse(const char *spec, struct RfsFunction **out_fn);

/**
 * # Safety
 * `f` must come from [`rfs_function_parse`] and not be freed twice.
 */
void rfs_function_free(struct RfsFunction *f);

/**
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_function_arity(const struct RfsFunction *f, size_t *out_n);

/**
 * `g(s)`, with bit 1 of `s` as its most significant bit.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_function_evaluate(const struct RfsFunction *f, uint32_t s, bool *out_bit);

/**
 * Whether `g(s) = (s . z) xor c` on its domain; `z` and `c` are written
 * only when it is.
 *
 * # Safety
 * Pointers must be valid; `out_z` and `out_c` may be null.
 */
enum RfsStatus rfs_function_is_parity(const struct RfsFunction *f,
                                      bool *out_is,
                                      uint32_t *out_z,
                                      bool *out_c);

/**
 * Value and certified gap of the joint nonparity game.
 *
 * # Safety
 * Pointers must be valid; `out_gap` may be null.
 */
enum RfsStatus rfs_mu_joint(const struct RfsFunction *f,
                            double tol,
                            double *out_value,
                            double *out_gap);

/**
 * Generate an explicit instance. `answer` is 0 or 1 to force the root
 * answer, or -1 to let the seed decide.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_instance_generate(const struct RfsFunction *f,
                                     size_t height,
                                     uint64_t seed,
                                     int32_t answer,
                                     struct RfsInstance **out_inst);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out_inst` must be writable.
 */
enum RfsStatus rfs_instance_from_json(const char *json, struct RfsInstance **out_inst);

/**
 * Serialize to JSON; release the string with [`rfs_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_instance_to_json(const struct RfsInstance *inst, char **out_json);

/**
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_instance_answer(const struct RfsInstance *inst, bool *out_bit);

/**
 * # Safety
 * `inst` must come from this library and not be freed twice.
 */
void rfs_instance_free(struct RfsInstance *inst);

/**
 * Counting oracle over a copy of `inst`; `inst` may be freed afterwards.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_oracle_new(const struct RfsInstance *inst, struct RfsOracle **out_oracle);

/**
 * Leaf value `A(x_1, ..., x_h)`; `xs` holds `height` edge labels.
 *
 * # Safety
 * `xs` must point to `len` readable values; other pointers must be valid.
 */
enum RfsStatus rfs_oracle_query(struct RfsOracle *oracle,
                                const uint32_t *xs,
                                size_t len,
                                bool *out_bit);

/**
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_oracle_query_count(const struct RfsOracle *oracle, uint64_t *out_count);

/**
 * # Safety
 * `oracle` must come from this library and not be freed twice.
 */
void rfs_oracle_free(struct RfsOracle *oracle);

/**
 * Build and run the recursive circuit for `inst` exactly. `mode` is an
 * [`RfsMode`] value, taken as an integer so out-of-range input is an
 * error rather than undefined behavior.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RfsStatus rfs_simulate(const struct RfsInstance *inst,
                            uint32_t mode,
                            struct RfsSimReport *out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RFS_H */
