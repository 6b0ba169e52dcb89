/* C interface to latbound: exact lattice point counts in ellipsoids and
 * verified product bounds.
 *
 * Usage pattern:
 *
 *     LbInstance *inst = NULL;
 *     if (lb_instance_parse_json(json_text, &inst) != LB_OK) {
 *         fprintf(stderr, "%s\n", lb_last_error_message());
 *         return 1;
 *     }
 *     char *report = NULL;
 *     LbStatus st = lb_verify_bhw_json(inst, false, &report);
 *     if (report != NULL) {
 *         puts(report);
 *         lb_string_free(report);
 *     }
 *     lb_instance_free(inst);
 *
 * Thread safety: handles are immutable after parsing and may be shared
 * across threads; the error message buffer is per thread.
 */

#ifndef LATBOUND_H
#define LATBOUND_H

#include <stdbool.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Outcome of a call. Numeric values match the CLI exit codes, with the
 * boundary-specific LB_INTERNAL_ERROR on top. */
typedef enum LbStatus {
  /* The call succeeded and every verification it ran passed. */
  LB_OK = 0,
  /* The call ran to completion but a verification check failed; the
   * report output is still produced. */
  LB_VERIFY_FAILED = 1,
  /* Malformed input, a null pointer, or an exceeded capacity limit. */
  LB_INVALID_INPUT = 2,
  /* The instance violates a theorem hypothesis (sphere separation). */
  LB_HYPOTHESIS_VIOLATION = 3,
  /* A panic was caught at the boundary; consult the error message. */
  LB_INTERNAL_ERROR = 4,
} LbStatus;

/* Opaque parsed instance handle. */
typedef struct LbInstance LbInstance;

/* Version of the library as a static nul-terminated string. */
const char *lb_version(void);

/* Message for the most recent failure on this thread. Never null; empty
 * before the first failure. Valid until the next failing call here. */
const char *lb_last_error_message(void);

/* Parses an instance from JSON text into a new handle. On LB_OK the caller
 * owns *out and must release it with lb_instance_free. */
LbStatus lb_instance_parse_json(const char *json, LbInstance **out);

/* Releases a handle from lb_instance_parse_json. Null is a no-op. */
void lb_instance_free(LbInstance *instance);

/* Total lattice-point count over all bodies of the instance. */
LbStatus lb_count(const LbInstance *instance, uint64_t *out_total);

/* Verifies count <= prod q_i and writes the JSON report. With via_strong
 * the check replays the full recursive proof instead. Returns LB_OK when
 * the verification passes, LB_VERIFY_FAILED when the report says no (the
 * report is still written). *out_json must be released with
 * lb_string_free. */
LbStatus lb_verify_bhw_json(const LbInstance *instance, bool via_strong,
                            char **out_json);

/* Runs the recursive sliced verification and writes the JSON report.
 * *out_json must be released with lb_string_free. */
LbStatus lb_verify_strong_json(const LbInstance *instance, char **out_json);

/* Translates the instance's sphere pack, re-verifies it against the
 * default scale samples, and writes the JSON report. *out_json must be
 * released with lb_string_free. */
LbStatus lb_translate_json(const LbInstance *instance, char **out_json);

/* Releases a string from an lb_*_json call. Null is a no-op. */
void lb_string_free(char *s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LATBOUND_H */
