#ifndef X3SAT_H
#define X3SAT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum X3satStatus {
  X3SAT_STATUS_OK = 0,
  X3SAT_STATUS_NULL_POINTER = 1,
  X3SAT_STATUS_INVALID_UTF8 = 2,
  X3SAT_STATUS_PARSE = 3,
  X3SAT_STATUS_INPUT = 4,
  X3SAT_STATUS_CONTRACT = 5,
  X3SAT_STATUS_INTERNAL = 6,
} X3satStatus;

/**
 * A parsed instance.
 */
typedef struct X3satInstance X3satInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `text` (NUL-terminated UTF-8) into a new instance stored in `*out`.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum X3satStatus x3sat_instance_parse(const char *text,
                                      bool dimacs_cnf,
                                      struct X3satInstance **out);

/**
 * Releases an instance; null is ignored.
 *
 * # Safety
 * `inst` must come from `x3sat_instance_parse` and not be used afterwards.
 */
void x3sat_instance_free(struct X3satInstance *inst);

/**
 * Declared variable count, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live instance.
 */
size_t x3sat_instance_num_vars(const struct X3satInstance *inst);

/**
 * Clause count, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live instance.
 */
size_t x3sat_instance_num_clauses(const struct X3satInstance *inst);

/**
 * Number of solutions as a decimal string in `*out`.
 *
 * # Safety
 * `inst` must be a live instance and `out` a valid pointer.
 */
enum X3satStatus x3sat_count(const struct X3satInstance *inst, uint64_t seed, char **out);

/**
 * Solutions per total weight as JSON `{"weight_shift":S,"coefficients":["a0","a1",...]}`
 * in `*out`. Coefficient `k` belongs to weight `k - S`. A `qbound` of 0
 * selects the default `n^2`.
 *
 * # Safety
 * `inst` must be a live instance and `out` a valid pointer.
 */
enum X3satStatus x3sat_count_weighted(const struct X3satInstance *inst,
                                      uint64_t qbound,
                                      uint64_t seed,
                                      char **out);

/**
 * Number of maximum-weight solutions (decimal string in `*count`) and
 * their weight (`*weight`). An unsatisfiable instance gives "0" and 0.
 *
 * # Safety
 * `inst` must be a live instance; `count` and `weight` valid pointers.
 */
enum X3satStatus x3sat_count_max_weight(const struct X3satInstance *inst,
                                        uint64_t seed,
                                        char **count,
                                        int64_t *weight);

/**
 * Branching factor of the `len` entries at `t`.
 *
 * # Safety
 * `t` must point to `len` readable values and `out` be a valid pointer.
 */
enum X3satStatus x3sat_tau(const uint32_t *t, size_t len, double *out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void x3sat_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *x3sat_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* X3SAT_H */
