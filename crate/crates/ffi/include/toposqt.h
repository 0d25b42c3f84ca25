#ifndef TOPOSQT_H
#define TOPOSQT_H

#include <stdbool.h>
#include <stddef.h>

// Outcome of a call.
typedef enum TqStatus {
  TQ_STATUS_OK = 0,
  // A required pointer argument was null.
  TQ_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  TQ_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or basis-file text; the error carries line and column.
  TQ_STATUS_PARSE = 3,
  // Well-formed input that names or describes something invalid.
  TQ_STATUS_VALIDATION = 4,
  TQ_STATUS_IO = 5,
  // The computation itself was rejected (unknown context, bad threshold, ...).
  TQ_STATUS_DOMAIN = 6,
  // Internal failure; the library caught a panic.
  TQ_STATUS_INTERNAL = 7,
} TqStatus;

// Validated scenario: operators, states, propositions and the context poset.
typedef struct TqScenario TqScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Load and validate a scenario file.
//
// # Safety
// `path` is a NUL-terminated string; `out` is writable.
enum TqStatus tq_scenario_load(const char *path, struct TqScenario **out);

// Validate a scenario given as JSON text.
//
// # Safety
// `text` is a NUL-terminated string; `out` is writable.
enum TqStatus tq_scenario_from_json(const char *text, struct TqScenario **out);

// Release a scenario. Null is ignored.
//
// # Safety
// `sc` is null or a handle not yet freed.
void tq_scenario_free(struct TqScenario *sc);

// Number of contexts in the scenario's poset, or 0 for a null handle.
//
// # Safety
// `sc` is null or a live handle.
size_t tq_scenario_context_count(const struct TqScenario *sc);

// The context poset with atoms, covers and maximal elements.
//
// # Safety
// `sc` is a live handle; `out` is writable.
enum TqStatus tq_contexts(const struct TqScenario *sc, char **out);

// Outer (or inner) daseinisation of a proposition, projector or operator.
// `at` may be null for every context.
//
// # Safety
// String arguments are NUL-terminated or, where optional, null.
enum TqStatus tq_daseinise(const struct TqScenario *sc,
                           const char *name,
                           bool inner,
                           const char *at,
                           char **out);

// Sieve-valued truth value. `at` and `r` may be null; `r` is a rational
// such as "3/4" and selects the probabilistic truth object.
//
// # Safety
// String arguments are NUL-terminated or, where optional, null.
enum TqStatus tq_truth_value(const struct TqScenario *sc,
                             const char *prop,
                             const char *state,
                             const char *at,
                             const char *r,
                             char **out);

// Pseudo-state of a pure state.
//
// # Safety
// String arguments are NUL-terminated.
enum TqStatus tq_pseudo_state(const struct TqScenario *sc, const char *state, char **out);

// Measure of the daseinised `subobject` in `state`, per context.
//
// # Safety
// String arguments are NUL-terminated.
enum TqStatus tq_measure(const struct TqScenario *sc,
                         const char *state,
                         const char *subobject,
                         char **out);

// Probabilistic truth value rooted at `root`, written "CONTEXT,r".
//
// # Safety
// String arguments are NUL-terminated.
enum TqStatus tq_prob_truth(const struct TqScenario *sc,
                            const char *prop,
                            const char *state,
                            const char *root,
                            char **out);

// Global sections of the spectral presheaf; `limit` 0 means all of them.
//
// # Safety
// `sc` is a live handle; `out` is writable.
enum TqStatus tq_global_sections(const struct TqScenario *sc, size_t limit, char **out);

// Unitary covariance of a truth value. `at` may be null.
//
// # Safety
// String arguments are NUL-terminated or, where optional, null.
enum TqStatus tq_covariance(const struct TqScenario *sc,
                            const char *prop,
                            const char *state,
                            const char *unitary,
                            const char *at,
                            char **out);

// Value interval of an operator at a spectral point "CONTEXT:ATOM".
//
// # Safety
// String arguments are NUL-terminated.
enum TqStatus tq_value_interval(const struct TqScenario *sc,
                                const char *op,
                                const char *point,
                                char **out);

// Everything the scenario supports in one document.
//
// # Safety
// `sc` is a live handle; `out` is writable.
enum TqStatus tq_report(const struct TqScenario *sc, char **out);

// Kochen-Specker colourability of a basis system. `source` is either
// `"kernaghan"` or the text of a basis file (one basis per line).
//
// # Safety
// `source` is NUL-terminated; `out` is writable.
enum TqStatus tq_ks_check(const char *source, bool with_poset, char **out);

// JSON description of the last failure on this thread, or null after a
// successful call. Valid until the next call on the same thread.
const char *tq_last_error(void);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or a string from this library not yet freed.
void tq_string_free(char *s);

// Library version, a static string.
const char *tq_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPOSQT_H */
