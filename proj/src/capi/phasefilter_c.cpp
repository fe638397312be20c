#include "phasefilter/phasefilter.h"

#include <string>

#include "../core/config.hpp"
#include "../core/errors.hpp"
#include "../core/invariants.hpp"
#include "../core/runner.hpp"

struct pf_session {
  pf::RunConfig config;
  std::string last_error;
};

namespace {

pf_status status_of(const pf::Error& err) {
  switch (err.kind()) {
    case pf::ErrorKind::parse: return PF_ERR_PARSE;
    case pf::ErrorKind::numeric: return PF_ERR_NUMERIC;
    case pf::ErrorKind::invalid_argument: return PF_ERR_INVALID;
  }
  return PF_ERR_INTERNAL;
}

template <typename Fn>
pf_status guarded(pf_session* session, Fn&& fn) {
  if (!session) return PF_ERR_INVALID;
  session->last_error.clear();
  try {
    fn();
    return PF_OK;
  } catch (const pf::Error& err) {
    session->last_error = err.what();
    return status_of(err);
  } catch (const std::exception& ex) {
    session->last_error = ex.what();
    return PF_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* pf_status_name(pf_status status) {
  switch (status) {
    case PF_OK: return "ok";
    case PF_ERR_PARSE: return "parse error";
    case PF_ERR_NUMERIC: return "numeric error";
    case PF_ERR_INVALID: return "invalid argument";
    case PF_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* pf_version(void) { return "0.1.0"; }

pf_status pf_session_create(pf_session** out) {
  if (!out) return PF_ERR_INVALID;
  try {
    *out = new pf_session();
    return PF_OK;
  } catch (...) {
    return PF_ERR_INTERNAL;
  }
}

void pf_session_destroy(pf_session* session) { delete session; }

pf_status pf_session_load_config(pf_session* session, const char* path) {
  if (!path) return PF_ERR_INVALID;
  return guarded(session, [&] {
    session->config = pf::RunConfig::from_file(path);
  });
}

pf_status pf_session_set(pf_session* session, const char* key,
                         const char* value) {
  if (!key || !value) return PF_ERR_INVALID;
  return guarded(session, [&] { session->config.set(key, value); });
}

const char* pf_session_error(const pf_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

pf_status pf_synthesize(pf_session* session, const char* out_dir) {
  if (!out_dir) return PF_ERR_INVALID;
  return guarded(session,
                 [&] { pf::cmd_synthesize(session->config, out_dir); });
}

pf_status pf_analyze(pf_session* session, const char* input_csv,
                     const char* out_dir) {
  if (!input_csv || !out_dir) return PF_ERR_INVALID;
  return guarded(session, [&] {
    pf::cmd_analyze(session->config, input_csv, out_dir);
  });
}

pf_status pf_trajectory(pf_session* session, const char* pulse_csv,
                        const char* out_dir) {
  if (!pulse_csv || !out_dir) return PF_ERR_INVALID;
  return guarded(session, [&] {
    pf::cmd_trajectory(session->config, pulse_csv, out_dir);
  });
}

pf_status pf_report(pf_session* session, const char* run_dir) {
  if (!run_dir) return PF_ERR_INVALID;
  return guarded(session, [&] { pf::cmd_report(run_dir); });
}

pf_status pf_phase_invariants(int n_qubits, const double* phases, double* out) {
  if (!phases || !out || n_qubits < 1 || n_qubits > 20) return PF_ERR_INVALID;
  try {
    const std::size_t dim = std::size_t{1} << n_qubits;
    pf::PhaseMap phi(n_qubits, std::vector<double>(phases, phases + dim));
    const pf::InvariantSet inv = pf::all_invariants(phi);
    for (std::size_t i = 0; i < dim; ++i) out[i] = inv.values[i];
    return PF_OK;
  } catch (const pf::Error& err) {
    return status_of(err);
  } catch (...) {
    return PF_ERR_INTERNAL;
  }
}

}  // extern "C"
