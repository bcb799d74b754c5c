#ifndef STRATLAB_H
#define STRATLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum StratStatus {
  StratStatus_Ok = 0,
  StratStatus_NullPointer = 1,
  StratStatus_InvalidUtf8 = 2,
  StratStatus_ParseError = 3,
  StratStatus_InvalidWorld = 4,
  StratStatus_DimensionMismatch = 5,
  StratStatus_IndexError = 6,
  StratStatus_EmptyDataset = 7,
  StratStatus_GridTooLarge = 8,
  StratStatus_InvalidDelta = 9,
  StratStatus_InvalidMixture = 10,
  StratStatus_ConfigError = 11,
  StratStatus_InvalidArgument = 12,
  StratStatus_NoCoords = 13,
  StratStatus_IoError = 14,
  StratStatus_BufferTooSmall = 15,
  StratStatus_Panic = 99,
} StratStatus;

/**
 * Opaque handle to a world and its hypothesis class.
 */
typedef struct StratProblem StratProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *strat_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *strat_version(void);

/**
 * Parses and validates a world JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StratStatus strat_problem_from_json(const char *json, struct StratProblem **out);

/**
 * Builds the default annulus scenario.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum StratStatus strat_problem_annulus_default(struct StratProblem **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `handle` must come from this library and not be used afterwards.
 */
void strat_problem_free(struct StratProblem *handle);

/**
 * Number of points in the world.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum StratStatus strat_problem_point_count(const struct StratProblem *handle, uintptr_t *out);

/**
 * Number of hypotheses in the class.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum StratStatus strat_problem_hypothesis_count(const struct StratProblem *handle, uintptr_t *out);

/**
 * Best response to hypothesis `k`: writes one target index per point.
 *
 * # Safety
 * `targets` must hold `capacity` writable entries.
 */
enum StratStatus strat_best_response_hypothesis(const struct StratProblem *handle,
                                                uintptr_t k,
                                                uintptr_t *targets,
                                                uintptr_t capacity);

/**
 * Best response to the mixture with `len` weights in class order.
 *
 * # Safety
 * `w` must point to `len` readable doubles and `targets` to `capacity`
 * writable entries.
 */
enum StratStatus strat_best_response_mixture(const struct StratProblem *handle,
                                             const double *w,
                                             uintptr_t len,
                                             uintptr_t *targets,
                                             uintptr_t capacity);

/**
 * Strategic risk of hypothesis `k` under its own best response.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum StratStatus strat_hypothesis_risk(const struct StratProblem *handle, uintptr_t k, double *out);

/**
 * Strategic risk of a mixture under its own best response.
 *
 * # Safety
 * `w` must point to `len` readable doubles; `out` must be valid.
 */
enum StratStatus strat_mixture_risk(const struct StratProblem *handle,
                                    const double *w,
                                    uintptr_t len,
                                    double *out);

/**
 * Condition report for optimal pairs, as JSON. Release the result with
 * `strat_string_free`.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum StratStatus strat_check_pairs_json(const struct StratProblem *handle,
                                        uint32_t grid_k,
                                        char **out);

/**
 * The problem serialised as a world JSON document. Release the result
 * with `strat_string_free`.
 *
 * # Safety
 * `handle` and `out` must be valid pointers.
 */
enum StratStatus strat_problem_to_json(const struct StratProblem *handle, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void strat_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRATLAB_H */
