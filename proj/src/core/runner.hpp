#ifndef PHASEFILTER_RUNNER_HPP
#define PHASEFILTER_RUNNER_HPP

#include <string>

#include "config.hpp"

namespace pf {

// Command-level orchestration behind the CLI and the C API. All commands
// throw pf::Error on failure; artifact writers are deterministic so that
// identical configs and seeds reproduce identical bytes.

// Runs the optimizer and writes pulse.csv, history.csv, search_summary.txt,
// trajectory.csv, populations.csv, summary.txt and report.txt.
void cmd_synthesize(const RunConfig& cfg, const std::string& out_dir);

// Input may be a phase-map CSV or a pulse CSV (detected by header). Writes
// invariants.csv and analysis.txt; for a pulse input, also phase_map.csv
// extracted from the framed propagator diagonal.
void cmd_analyze(const RunConfig& cfg, const std::string& input_csv,
                 const std::string& out_dir);

// Replays a pulse CSV and writes trajectory.csv, populations.csv and
// summary.txt.
void cmd_trajectory(const RunConfig& cfg, const std::string& pulse_csv,
                    const std::string& out_dir);

// Consolidates a run directory's summary.txt into report.txt (also returned),
// recomputing the dephasing estimates for T2 in {0.5, 1} ms.
std::string cmd_report(const std::string& run_dir);

}  // namespace pf

#endif
