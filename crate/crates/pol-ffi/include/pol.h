#ifndef POL_FFI_H
#define POL_FFI_H

/* Generated by cbindgen from pol-ffi; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Box-semantics selector for [`pol_eval`].
 */
typedef enum PolSemantics {
  POL_SEMANTICS_RESIDUATION = 0,
  POL_SEMANTICS_EXISTENTIAL = 1,
  POL_SEMANTICS_PROTOCOL = 2,
} PolSemantics;

/**
 * Outcome of a call. Anything but `Ok` leaves a detail message in
 * [`pol_last_error_message`].
 */
typedef enum PolStatus {
  POL_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  POL_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  POL_STATUS_INVALID_UTF8 = 2,
  /**
   * Scenario, schedule, or formula text failed to parse.
   */
  POL_STATUS_PARSE_ERROR = 3,
  /**
   * The named session does not exist.
   */
  POL_STATUS_UNKNOWN_SESSION = 4,
  /**
   * The addressed session has already been answered.
   */
  POL_STATUS_ALREADY_RESOLVED = 5,
  /**
   * A search or evaluation bound was exhausted.
   */
  POL_STATUS_BOUND_EXCEEDED = 6,
  /**
   * Formula evaluation failed (unknown atom or agent, say).
   */
  POL_STATUS_EVAL_ERROR = 7,
  /**
   * Any other run failure.
   */
  POL_STATUS_RUN_ERROR = 8,
  /**
   * The library caught a panic; state may be stale but is not corrupt.
   */
  POL_STATUS_INTERNAL_ERROR = 9,
} PolStatus;

/**
 * Opaque parallel-state handle; owns its scenario reference data.
 */
typedef struct PolParallel PolParallel;

/**
 * Opaque scenario handle.
 */
typedef struct PolScenario PolScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail text for the most recent failure on this thread. The pointer is
 * owned by the library and valid until the next failing call.
 */
const char *pol_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must have been returned by a `pol_*` function and not freed yet.
 */
void pol_string_free(char *s);

/**
 * Parses the line-oriented scenario format into a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PolStatus pol_scenario_parse(const char *text, struct PolScenario **out);

/**
 * Parses the JSON scenario form into a new handle.
 *
 * # Safety
 * As [`pol_scenario_parse`].
 */
enum PolStatus pol_scenario_parse_json(const char *text, struct PolScenario **out);

/**
 * # Safety
 * `scenario` must come from a `pol_scenario_parse*` call, not yet freed.
 */
void pol_scenario_free(struct PolScenario *scenario);

/**
 * Builds a fresh parallel state over the scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `out` a valid pointer.
 */
enum PolStatus pol_parallel_new(const struct PolScenario *scenario, struct PolParallel **out);

/**
 * # Safety
 * `parallel` must come from [`pol_parallel_new`], not yet freed.
 */
void pol_parallel_free(struct PolParallel *parallel);

/**
 * Applies one father's question in the named session (with propagation),
 * updating the handle in place.
 *
 * # Safety
 * `parallel` must be a live handle; `session` a NUL-terminated string.
 */
enum PolStatus pol_parallel_ask(struct PolParallel *parallel, const char *session);

/**
 * Total questions asked so far.
 *
 * # Safety
 * `parallel` must be a live handle.
 */
size_t pol_parallel_total_asked(const struct PolParallel *parallel);

/**
 * Has every father heard an answer?
 *
 * # Safety
 * `parallel` must be a live handle.
 */
bool pol_parallel_all_answered(const struct PolParallel *parallel);

/**
 * Does every child of every session know their own state?
 *
 * # Safety
 * `parallel` must be a live handle.
 */
bool pol_parallel_all_resolved(const struct PolParallel *parallel);

/**
 * Comma-separated bit-string worlds of one session, in agent order.
 *
 * # Safety
 * `parallel` live handle, `session` NUL-terminated, `out` valid; the
 * result string must be freed with [`pol_string_free`].
 */
enum PolStatus pol_parallel_session_worlds(const struct PolParallel *parallel,
                                           const char *session,
                                           char **out);

/**
 * The JSON trace of everything the handle has done so far.
 *
 * # Safety
 * As [`pol_parallel_session_worlds`].
 */
enum PolStatus pol_parallel_trace_json(const struct PolParallel *parallel, char **out);

/**
 * Runs a comma-separated schedule from a fresh state and returns the JSON
 * trace. Fails without output if the schedule is invalid.
 *
 * # Safety
 * `scenario` live handle; `schedule` NUL-terminated; `out` valid; result
 * freed with [`pol_string_free`].
 */
enum PolStatus pol_run_schedule_json(const struct PolScenario *scenario,
                                     const char *schedule,
                                     char **out);

/**
 * Finds a minimal schedule answering every session within `bound` total
 * questions; writes the question count and the comma-separated schedule.
 *
 * # Safety
 * `scenario` live handle; `out_min` and `out_schedule` valid pointers;
 * the schedule string is freed with [`pol_string_free`].
 */
enum PolStatus pol_search_min(const struct PolScenario *scenario,
                              size_t bound,
                              size_t *out_min,
                              char **out_schedule);

/**
 * Evaluates a formula on a fresh model of the named session, at every
 * world, under the chosen box semantics.
 *
 * # Safety
 * `scenario` live handle; `session` and `formula` NUL-terminated;
 * `out_value` a valid pointer.
 */
enum PolStatus pol_eval(const struct PolScenario *scenario,
                        const char *session,
                        const char *formula,
                        enum PolSemantics semantics,
                        bool *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POL_FFI_H */
