/* phasefilter: phase-invariant control synthesis for an NV spin register.
 *
 * C interface to the shared library. All entry points are thread-compatible
 * (distinct sessions may be used from distinct threads); a single session is
 * not synchronized. Strings returned by the library stay valid until the next
 * call on the same session, or for the process lifetime for static data.
 */
#ifndef PHASEFILTER_H
#define PHASEFILTER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The CLI maps parse errors to exit 2 and numeric errors to
 * exit 3, so those enumerators carry the matching values. */
typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_PARSE = 2,   /* malformed config/CSV, unknown key, missing artifact */
  PF_ERR_NUMERIC = 3, /* ill-conditioned or non-finite numerical state */
  PF_ERR_INVALID = 4, /* contract violation (null handle, bad argument) */
  PF_ERR_INTERNAL = 5
} pf_status;

const char* pf_status_name(pf_status status);
const char* pf_version(void);

/* A session holds one run configuration (register parameters, pulse shape,
 * targets, search and grid settings). Created with built-in defaults. */
typedef struct pf_session pf_session;

pf_status pf_session_create(pf_session** out);
void pf_session_destroy(pf_session* session);

/* Loads a key = value config file into the session, replacing the current
 * configuration (defaults still back absent keys). */
pf_status pf_session_load_config(pf_session* session, const char* path);

/* Sets one configuration key, same keys and validation as the file. */
pf_status pf_session_set(pf_session* session, const char* key,
                         const char* value);

/* Message for the most recent failure on this session; empty if none. */
const char* pf_session_error(const pf_session* session);

/* Commands. Artifacts are written into out_dir (created if needed). */
pf_status pf_synthesize(pf_session* session, const char* out_dir);
pf_status pf_analyze(pf_session* session, const char* input_csv,
                     const char* out_dir);
pf_status pf_trajectory(pf_session* session, const char* pulse_csv,
                        const char* out_dir);
pf_status pf_report(pf_session* session, const char* run_dir);

/* Direct numerical entry point: support-selective phase invariants of a
 * diagonal phase map. phases has 2^n entries indexed by configuration
 * (qubit 1 = most significant bit); out receives 2^n entries indexed by
 * subset mask, with out[0] = 0. */
pf_status pf_phase_invariants(int n_qubits, const double* phases, double* out);

#ifdef __cplusplus
}
#endif

#endif /* PHASEFILTER_H */
