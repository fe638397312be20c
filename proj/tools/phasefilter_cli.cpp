// Command-line front end. Links the shared C API only.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <string>

#include "phasefilter/phasefilter.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string frame;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int finish(pf_session* session, pf_status status, const char* command) {
  if (status != PF_OK)
    std::fprintf(stderr, "phasefilter %s: %s: %s\n", command,
                 pf_status_name(status), pf_session_error(session));
  pf_session_destroy(session);
  if (status == PF_OK) return 0;
  if (status == PF_ERR_PARSE) return 2;
  if (status == PF_ERR_NUMERIC) return 3;
  return 4;
}

pf_status apply_common(pf_session* session, const CommonOpts& opts) {
  pf_status status = PF_OK;
  if (!opts.config_path.empty())
    status = pf_session_load_config(session, opts.config_path.c_str());
  if (status == PF_OK && opts.seed_set)
    status = pf_session_set(session, "search.seed",
                            std::to_string(opts.seed).c_str());
  if (status == PF_OK && !opts.frame.empty())
    status = pf_session_set(session, "target.frame", opts.frame.c_str());
  return status;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_frame = true) {
  cmd->add_option("--config", opts.config_path, "run configuration file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "search RNG seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  if (with_frame)
    cmd->add_option("--frame", opts.frame, "canonical|hadamard_a")
        ->check(CLI::IsMember({"canonical", "hadamard_a"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-invariant pulse synthesis for an NV spin register"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string pulse_csv, input_csv, run_dir;

  CLI::App* synth = app.add_subcommand(
      "synthesize", "optimize a pulse for the configured gate");
  add_common(synth, opts);

  CLI::App* analyze = app.add_subcommand(
      "analyze", "phase invariants of a phase-map CSV or a pulse CSV");
  add_common(analyze, opts);
  analyze->add_option("input", input_csv, "phase-map or pulse CSV")
      ->required();

  CLI::App* traj = app.add_subcommand(
      "trajectory", "time-resolved invariants and populations for a pulse");
  add_common(traj, opts);
  traj->add_option("--pulse", pulse_csv, "pulse CSV to replay")->required();

  CLI::App* report =
      app.add_subcommand("report", "consolidated report for a run directory");
  report->add_option("rundir", run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  pf_session* session = nullptr;
  if (pf_session_create(&session) != PF_OK) {
    std::fprintf(stderr, "phasefilter: cannot create session\n");
    return 4;
  }

  if (report->parsed()) {
    return finish(session, pf_report(session, run_dir.c_str()), "report");
  }

  pf_status status = apply_common(session, opts);
  const std::string out = opts.out_dir.empty() ? "out" : opts.out_dir;
  if (status == PF_OK && !opts.out_dir.empty())
    status = pf_session_set(session, "output.dir", opts.out_dir.c_str());

  if (status == PF_OK) {
    if (synth->parsed())
      status = pf_synthesize(session, out.c_str());
    else if (analyze->parsed())
      status = pf_analyze(session, input_csv.c_str(), out.c_str());
    else if (traj->parsed())
      status = pf_trajectory(session, pulse_csv.c_str(), out.c_str());
  }
  const char* name = synth->parsed()   ? "synthesize"
                     : analyze->parsed() ? "analyze"
                                         : "trajectory";
  return finish(session, status, name);
}
