#include "runner.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "csvio.hpp"
#include "errors.hpp"

namespace pf {

namespace {

constexpr double kT2Short = 0.5e-3;
constexpr double kT2Long = 1.0e-3;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw_parse("cannot create output directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Ordered key: value text block, the carrier for summary.txt / report.txt.
class KeyValueText {
 public:
  void add(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    rows_.emplace_back(key, format_number(value));
  }
  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw_parse("cannot write file: " + path);
    out << text();
  }
  std::string text() const {
    std::ostringstream out;
    for (const auto& [k, v] : rows_) out << k << ": " << v << '\n';
    return out.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_parse("cannot read file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    out[key] = value;
  }
  return out;
}

const std::uint32_t kSubsetOrder[7] = {4, 2, 1, 6, 5, 3, 7};

void add_invariant_rows(KeyValueText& text, const std::string& prefix,
                        const InvariantSet& inv) {
  for (const std::uint32_t mask : kSubsetOrder)
    text.add(prefix + SubsetMask(inv.n, mask).label() + "_rad",
             inv.values[mask]);
}

struct RunArtifacts {
  Evaluation eval;
  Trajectory traj;
  InvariantSet final_inv;  // from the trajectory's unwrapped final sample
};

// Shared trajectory + summary path for synthesize/trajectory commands.
RunArtifacts run_trajectory_artifacts(const RunConfig& cfg,
                                      const SearchContext& ctx,
                                      const std::vector<double>& params,
                                      const std::string& out_dir) {
  RunArtifacts art;
  art.eval = evaluate(params, ctx);
  const PulseParams pulse = ctx.make_pulse(params);
  art.traj = trajectory(pulse, ctx.config(), ctx.frame(), ctx.logical_frame(),
                        ctx.grid(), cfg.stride());
  art.final_inv.n = 3;
  art.final_inv.values.assign(8, 0.0);
  for (std::uint32_t mask = 1; mask < 8; ++mask)
    art.final_inv.values[mask] = art.traj.samples.back().delta[mask];
  write_trajectory_csv(join(out_dir, "trajectory.csv"), art.traj);
  write_populations_csv(join(out_dir, "populations.csv"), art.traj);
  return art;
}

void write_summary(const RunConfig& cfg, const RunArtifacts& art,
                   const std::string& out_dir, bool have_eval) {
  const double exposure = integrated_exposure(art.traj.exposure);
  KeyValueText text;
  text.add("gate", cfg.gate());
  text.add("frame", cfg.frame_kind() == FrameKind::canonical ? "canonical"
                                                             : "hadamard_a");
  text.add("duration_ns", cfg.duration_s() * 1e9);
  text.add("dt_ns", cfg.dt_s() * 1e9);
  text.add("stride", static_cast<double>(cfg.stride()));
  if (have_eval) {
    text.add("fidelity_raw", art.eval.fidelity_raw);
    text.add("fidelity_after_correction", art.eval.fidelity_corrected);
    text.add("cost", art.eval.cost_only);
    text.add("composite", art.eval.composite);
    text.add("leakage", art.eval.leakage);
    text.add("non_unitarity", art.eval.non_unitarity);
    text.add("slew_mt_per_us_sq", art.eval.slew);
  }
  add_invariant_rows(text, "delta_", art.final_inv);
  text.add("exposure_us", exposure * 1e6);
  text.add("dephasing_t2_0.5ms", dephasing_from_exposure(exposure, kT2Short));
  text.add("dephasing_t2_1ms", dephasing_from_exposure(exposure, kT2Long));
  text.add("invalid_samples", static_cast<double>(art.traj.invalid_samples));
  text.write(join(out_dir, "summary.txt"));
}

}  // namespace

void cmd_synthesize(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const SearchContext ctx(cfg.search_spec(), cfg.register_config(), cfg.grid());
  const SearchResult result = optimize(ctx);
  if (result.best_params.empty())
    throw_numeric("search produced no evaluable candidate");

  write_pulse_csv(join(out_dir, "pulse.csv"), ctx.grid(),
                  envelope_midpoints(result.best_pulse, ctx.grid()));
  write_history_csv(join(out_dir, "history.csv"), result.history);

  KeyValueText search_text;
  search_text.add("seed", static_cast<double>(ctx.spec().seed));
  search_text.add("budget_per_restart", static_cast<double>(ctx.spec().budget));
  search_text.add("restarts_run", static_cast<double>(result.restarts_run));
  search_text.add("evaluations", static_cast<double>(result.evaluations));
  search_text.add("termination", result.termination);
  search_text.add("best_composite", result.best_eval.composite);
  search_text.add("best_cost", result.best_eval.cost_only);
  search_text.add("fidelity_after_correction",
                  result.best_eval.fidelity_corrected);
  for (std::size_t i = 0; i < result.best_pulse.tones.size(); ++i) {
    const Tone& tone = result.best_pulse.tones[i];
    const std::string p = "tone_" + std::to_string(i) + "_";
    search_text.add(p + "amplitude_mt", tone.amplitude_t * 1e3);
    search_text.add(p + "freq_mhz",
                    tone.freq_rad_s / (2.0 * std::numbers::pi) * 1e-6);
    search_text.add(p + "phase_rad", tone.phase_rad);
  }
  search_text.write(join(out_dir, "search_summary.txt"));

  const RunArtifacts art =
      run_trajectory_artifacts(cfg, ctx, result.best_params, out_dir);
  write_summary(cfg, art, out_dir, true);
  cmd_report(out_dir);
}

void cmd_analyze(const RunConfig& cfg, const std::string& input_csv,
                 const std::string& out_dir) {
  ensure_dir(out_dir);
  PhaseMap phases = PhaseMap::zero(1);
  if (file_has_phase_map_header(input_csv)) {
    phases = read_phase_map_csv(input_csv);
  } else {
    const SampledPulse pulse = read_pulse_csv(input_csv);
    const RegisterConfig reg = cfg.register_config();
    const DerivedFrame frame =
        derive_frame(reg, cfg.search_spec().shape.carrier_offset_rad_s);
    const LogicalFrame lframe = LogicalFrame::make(cfg.frame_kind());
    const Matrix u = propagate_sampled(pulse.envelope_t, reg, frame, pulse.grid);
    const LogicalBlock block = logical_block(u, lframe);
    const FramedPhases fp = framed_diagonal_phases(block.u_logical, lframe);
    phases = fp.phases;
    write_phase_map_csv(join(out_dir, "phase_map.csv"), phases);
  }

  const InvariantSet inv = all_invariants(phases);
  write_invariants_csv(join(out_dir, "invariants.csv"), inv);

  KeyValueText text;
  text.add("qubits", static_cast<double>(phases.n));
  for (std::uint32_t mask = 1; mask < inv.values.size(); ++mask) {
    const SubsetMask s(phases.n, mask);
    const std::string label = s.label();
    text.add("delta_" + label + "_rad", inv.values[mask]);
    text.add("delta_" + label + "_definition_route_rad",
             invariant_definition_route(phases, s));
    if (phases.n == 3) {
      text.add("delta_" + label + "_appendix_form_rad",
               invariant_appendix_b(phases, s));
      text.add("delta_" + label + "_sign_relation",
               (s.order() & 1) ? "normative = -appendix_form"
                               : "normative = +appendix_form");
    }
  }
  text.write(join(out_dir, "analysis.txt"));
}

void cmd_trajectory(const RunConfig& cfg, const std::string& pulse_csv,
                    const std::string& out_dir) {
  ensure_dir(out_dir);
  const SampledPulse pulse = read_pulse_csv(pulse_csv);
  const RegisterConfig reg = cfg.register_config();
  const DerivedFrame frame =
      derive_frame(reg, cfg.search_spec().shape.carrier_offset_rad_s);
  const LogicalFrame lframe = LogicalFrame::make(cfg.frame_kind());
  RunArtifacts art;
  art.traj = trajectory_sampled(pulse.envelope_t, reg, frame, lframe,
                                pulse.grid, cfg.stride());
  art.final_inv.n = 3;
  art.final_inv.values.assign(8, 0.0);
  for (std::uint32_t mask = 1; mask < 8; ++mask)
    art.final_inv.values[mask] = art.traj.samples.back().delta[mask];
  write_trajectory_csv(join(out_dir, "trajectory.csv"), art.traj);
  write_populations_csv(join(out_dir, "populations.csv"), art.traj);
  write_summary(cfg, art, out_dir, false);
}

std::string cmd_report(const std::string& run_dir) {
  const std::string summary_path = join(run_dir, "summary.txt");
  if (!std::filesystem::exists(summary_path))
    throw_parse("missing artifact: " + summary_path);
  const auto summary = read_key_values(summary_path);
  const auto need = [&](const std::string& key) {
    const auto it = summary.find(key);
    if (it == summary.end())
      throw_parse("summary.txt is missing key: " + key);
    return it->second;
  };

  KeyValueText report;
  report.add("gate", need("gate"));
  report.add("frame", need("frame"));
  for (const char* key :
       {"fidelity_raw", "fidelity_after_correction", "cost", "composite",
        "leakage", "non_unitarity"})
    if (summary.count(key)) report.add(key, summary.at(key));
  for (const std::uint32_t mask : kSubsetOrder) {
    const std::string key =
        "delta_" + SubsetMask(3, mask).label() + "_rad";
    report.add(key, need(key));
  }
  const double exposure_us = std::stod(need("exposure_us"));
  report.add("exposure_us", exposure_us);
  report.add("dephasing_t2_0.5ms",
             dephasing_from_exposure(exposure_us * 1e-6, kT2Short));
  report.add("dephasing_t2_1ms",
             dephasing_from_exposure(exposure_us * 1e-6, kT2Long));
  report.write(join(run_dir, "report.txt"));
  return report.text();
}

}  // namespace pf
