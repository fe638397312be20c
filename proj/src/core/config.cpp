#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace pf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<std::pair<const char*, const char*>> kDefaults = {
    {"register.gamma_e_mhz_per_t", "28024.0"},
    {"register.b0_mt", "450.0"},
    {"register.n14.gamma_mhz_per_t", "3.077"},
    {"register.n14.a_zz_mhz", "-2.14"},
    {"register.n14.a_perp_mhz", "0.0"},
    {"register.n14.q_mhz", "-5.01"},
    {"register.c1.gamma_mhz_per_t", "10.71"},
    {"register.c1.a_zz_mhz", "2.281"},
    {"register.c1.a_perp_mhz", "0.240"},
    {"register.c1.q_mhz", "0.0"},
    {"register.c2.gamma_mhz_per_t", "10.71"},
    {"register.c2.a_zz_mhz", "-1.011"},
    {"register.c2.a_perp_mhz", "0.014"},
    {"register.c2.q_mhz", "0.0"},
    {"pulse.duration_ns", "1500"},
    {"pulse.taper_fraction", "0.15"},
    {"pulse.tone_count", "8"},
    {"pulse.amplitude_limit_mt", "5.0"},
    {"pulse.frequency_band_mhz", "10.0"},
    {"pulse.carrier_offset_mhz", "0.0"},
    {"target.gate", "zzz"},
    {"target.frame", "auto"},
    {"target.delta_a_rad", "unconstrained"},
    {"target.delta_b_rad", "unconstrained"},
    {"target.delta_c_rad", "unconstrained"},
    {"target.delta_ab_rad", "0.0"},
    {"target.delta_ac_rad", "0.0"},
    {"target.delta_bc_rad", "0.0"},
    {"target.delta_abc_rad", "0.7853981633974483"},
    {"target.weight_1", "0.0"},
    {"target.weight_2", "1.0"},
    {"target.weight_3", "1.0"},
    {"search.seed", "0"},
    {"search.budget", "20000"},
    {"search.restarts", "4"},
    {"search.method", "derivative_free"},
    {"search.lambda_leakage", "10.0"},
    {"search.lambda_unitarity", "10.0"},
    {"search.lambda_slew", "0.001"},
    {"search.stop_composite", "0.0001"},
    {"search.threads", "0"},
    {"grid.dt_ns", "0.25"},
    {"grid.stride", "20"},
    {"output.dir", "out"},
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [key, value] : kDefaults) {
    values_[key] = value;
    order_.push_back(key);
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_parse("cannot read config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw_parse(path + ":" + std::to_string(lineno) +
                  ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) throw_parse("unknown config key: " + key);
  if (value.empty()) throw_parse("empty value for config key: " + key);
  const std::string previous = values_[key];
  values_[key] = value;
  try {
    validate();
  } catch (...) {
    values_[key] = previous;
    throw;
  }
}

void RunConfig::validate() const {
  register_config();
  search_spec();
  grid();
  stride();
  output_dir();
}

std::string RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw_parse("unknown config key: " + key);
  return it->second;
}

double RunConfig::number(const std::string& key) const {
  const std::string raw = get(key);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    throw_parse("config key " + key + " is not a number: " + raw);
  }
  if (used != raw.size() || !std::isfinite(v))
    throw_parse("config key " + key + " is not a number: " + raw);
  return v;
}

RegisterConfig RunConfig::register_config() const {
  RegisterConfig reg;
  reg.gamma_e_hz_per_t = number("register.gamma_e_mhz_per_t") * 1e6;
  reg.b0_t = number("register.b0_mt") * 1e-3;
  auto nucleus = [&](const std::string& prefix, const char* species,
                     int spin_doubled) {
    NucleusSpec n;
    n.species = species;
    n.spin_doubled = spin_doubled;
    n.gamma_hz_per_t = number(prefix + ".gamma_mhz_per_t") * 1e6;
    n.a_zz_hz = number(prefix + ".a_zz_mhz") * 1e6;
    n.a_perp_hz = number(prefix + ".a_perp_mhz") * 1e6;
    n.q_hz = number(prefix + ".q_mhz") * 1e6;
    return n;
  };
  reg.nuclei = {nucleus("register.n14", "14N", 2),
                nucleus("register.c1", "13C1", 1),
                nucleus("register.c2", "13C2", 1)};
  reg.validate();
  return reg;
}

std::string RunConfig::gate() const {
  const std::string g = get("target.gate");
  if (g != "zzz" && g != "xzz")
    throw_parse("target.gate must be zzz or xzz, got " + g);
  return g;
}

FrameKind RunConfig::frame_kind() const {
  const std::string f = get("target.frame");
  if (f == "canonical") return FrameKind::canonical;
  if (f == "hadamard_a") return FrameKind::hadamard_on_a;
  if (f == "auto")
    return gate() == "xzz" ? FrameKind::hadamard_on_a : FrameKind::canonical;
  throw_parse("target.frame must be auto, canonical or hadamard_a");
}

double RunConfig::duration_s() const {
  const double t = number("pulse.duration_ns") * 1e-9;
  if (!(t > 0)) throw_parse("pulse.duration_ns must be positive");
  return t;
}

double RunConfig::dt_s() const {
  const double dt = number("grid.dt_ns") * 1e-9;
  if (!(dt > 0)) throw_parse("grid.dt_ns must be positive");
  return dt;
}

TimeGrid RunConfig::grid() const {
  const double t = duration_s();
  const double dt = dt_s();
  const int steps = std::max(1, static_cast<int>(std::llround(t / dt)));
  return TimeGrid(t, steps);
}

int RunConfig::stride() const {
  const double s = number("grid.stride");
  if (s < 1 || s != std::floor(s)) throw_parse("grid.stride must be >= 1");
  return static_cast<int>(s);
}

std::string RunConfig::output_dir() const { return get("output.dir"); }

SearchSpec RunConfig::search_spec() const {
  SearchSpec spec;
  spec.frame_kind = frame_kind();

  spec.target = TargetSpec(3);
  const std::vector<std::pair<std::string, std::uint32_t>> subset_keys = {
      {"target.delta_a_rad", 4}, {"target.delta_b_rad", 2},
      {"target.delta_c_rad", 1}, {"target.delta_ab_rad", 6},
      {"target.delta_ac_rad", 5}, {"target.delta_bc_rad", 3},
      {"target.delta_abc_rad", 7}};
  for (const auto& [key, mask] : subset_keys) {
    const std::string raw = get(key);
    if (raw == "unconstrained" || raw == "none") continue;
    spec.target.set_target(SubsetMask(3, mask), number(key));
  }
  spec.target.weights[1] = number("target.weight_1");
  spec.target.weights[2] = number("target.weight_2");
  spec.target.weights[3] = number("target.weight_3");

  spec.shape.duration_s = duration_s();
  spec.shape.taper = number("pulse.taper_fraction");
  if (spec.shape.taper < 0 || spec.shape.taper > 1)
    throw_parse("pulse.taper_fraction must lie in [0, 1]");
  const double tones = number("pulse.tone_count");
  if (tones < 1 || tones > 32 || tones != std::floor(tones))
    throw_parse("pulse.tone_count must be an integer in [1, 32]");
  spec.shape.tone_count = static_cast<int>(tones);
  spec.shape.amplitude_limit_t = number("pulse.amplitude_limit_mt") * 1e-3;
  spec.shape.freq_band_rad_s = kTwoPi * number("pulse.frequency_band_mhz") * 1e6;
  spec.shape.carrier_offset_rad_s =
      kTwoPi * number("pulse.carrier_offset_mhz") * 1e6;

  const double seed = number("search.seed");
  if (seed < 0 || seed != std::floor(seed))
    throw_parse("search.seed must be a nonnegative integer");
  spec.seed = static_cast<std::uint64_t>(seed);
  const double budget = number("search.budget");
  if (budget < 1 || budget != std::floor(budget))
    throw_parse("search.budget must be a positive integer");
  spec.budget = static_cast<long>(budget);
  const double restarts = number("search.restarts");
  if (restarts < 1 || restarts != std::floor(restarts))
    throw_parse("search.restarts must be a positive integer");
  spec.restarts = static_cast<int>(restarts);
  const std::string method = get("search.method");
  if (method == "derivative_free")
    spec.method = SearchMethod::derivative_free;
  else if (method == "finite_difference_gradient")
    spec.method = SearchMethod::finite_difference_gradient;
  else
    throw_parse(
        "search.method must be derivative_free or finite_difference_gradient");
  spec.lambda_leakage = number("search.lambda_leakage");
  spec.lambda_unitarity = number("search.lambda_unitarity");
  spec.lambda_slew = number("search.lambda_slew");
  spec.stop_composite = number("search.stop_composite");
  spec.threads = static_cast<int>(number("search.threads"));
  return spec;
}

}  // namespace pf
