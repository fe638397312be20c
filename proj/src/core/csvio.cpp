#include "csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace pf {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& raw, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    throw_parse(where + ": not a number: '" + raw + "'");
  }
  if (used != raw.size()) throw_parse(where + ": not a number: '" + raw + "'");
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_parse("cannot read file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw_parse("empty file: " + path);
  return lines;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_parse("cannot write file: " + path);
  return out;
}

std::string bits_string(std::uint32_t value, int n) {
  std::string s(n, '0');
  for (int i = 0; i < n; ++i)
    if ((value >> (n - 1 - i)) & 1u) s[i] = '1';
  return s;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_phase_map_csv(const std::string& path, const PhaseMap& phi) {
  auto out = open_out(path);
  out << "index,bits,phase_rad\n";
  for (std::uint32_t x = 0; x < phi.values.size(); ++x)
    out << x << ',' << bits_string(x, phi.n) << ','
        << format_number(phi.values[x]) << '\n';
}

PhaseMap read_phase_map_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines[0] != "index,bits,phase_rad")
    throw_parse(path + ": expected header index,bits,phase_rad");
  const std::size_t rows = lines.size() - 1;
  int n = 0;
  while ((std::size_t{1} << n) < rows && n < 21) ++n;
  if (n < 1 || n > 20 || (std::size_t{1} << n) != rows)
    throw_parse(path + ": row count must be 2^n for n in [1, 20]");
  std::vector<double> values(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split(lines[r + 1], ',');
    const std::string where = path + " row " + std::to_string(r + 1);
    if (fields.size() != 3) throw_parse(where + ": expected 3 columns");
    const double idx = parse_double(fields[0], where);
    if (idx != static_cast<double>(r))
      throw_parse(where + ": indices must ascend from 0");
    if (fields[1] != bits_string(static_cast<std::uint32_t>(r), n))
      throw_parse(where + ": bits column disagrees with index");
    values[r] = parse_double(fields[2], where);
    if (!std::isfinite(values[r]))
      throw_parse(where + ": phase must be finite");
  }
  return PhaseMap(n, std::move(values));
}

void write_invariants_csv(const std::string& path, const InvariantSet& inv) {
  auto out = open_out(path);
  out << "subset_bits,subset_label,delta_rad\n";
  for (std::uint32_t mask = 1; mask < inv.values.size(); ++mask) {
    const SubsetMask s(inv.n, mask);
    out << bits_string(mask, inv.n) << ',' << s.label() << ','
        << format_number(inv.values[mask]) << '\n';
  }
}

InvariantSet read_invariants_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines[0] != "subset_bits,subset_label,delta_rad")
    throw_parse(path + ": expected header subset_bits,subset_label,delta_rad");
  const std::size_t rows = lines.size() - 1;
  int n = 0;
  while ((std::size_t{1} << n) - 1 < rows && n < 21) ++n;
  if (n < 1 || n > 20 || (std::size_t{1} << n) - 1 != rows)
    throw_parse(path + ": row count must be 2^n - 1");
  InvariantSet inv;
  inv.n = n;
  inv.values.assign(std::size_t{1} << n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split(lines[r + 1], ',');
    const std::string where = path + " row " + std::to_string(r + 1);
    if (fields.size() != 3) throw_parse(where + ": expected 3 columns");
    const std::uint32_t mask = static_cast<std::uint32_t>(r + 1);
    if (fields[0] != bits_string(mask, n))
      throw_parse(where + ": subsets must ascend by mask");
    if (fields[1] != SubsetMask(n, mask).label())
      throw_parse(where + ": label disagrees with mask");
    inv.values[mask] = parse_double(fields[2], where);
  }
  return inv;
}

void write_pulse_csv(const std::string& path, const TimeGrid& grid,
                     const std::vector<double>& envelope_t) {
  if (static_cast<int>(envelope_t.size()) != grid.steps)
    throw_invalid("pulse sample count must equal the grid step count");
  auto out = open_out(path);
  out << "t_ns,envelope\n";
  for (int k = 0; k < grid.steps; ++k)
    out << format_number(grid.midpoint(k) * 1e9) << ','
        << format_number(envelope_t[k] * 1e3) << '\n';
}

SampledPulse read_pulse_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines[0] != "t_ns,envelope")
    throw_parse(path + ": expected header t_ns,envelope");
  const std::size_t rows = lines.size() - 1;
  if (rows < 1) throw_parse(path + ": no samples");
  std::vector<double> t_s(rows), env_t(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split(lines[r + 1], ',');
    const std::string where = path + " row " + std::to_string(r + 1);
    if (fields.size() != 2) throw_parse(where + ": expected 2 columns");
    t_s[r] = parse_double(fields[0], where) * 1e-9;
    env_t[r] = parse_double(fields[1], where) * 1e-3;
  }
  // Samples must sit on the uniform midpoint grid t_k = (k + 1/2) dt.
  const double dt = 2.0 * t_s[0];
  if (!(dt > 0)) throw_parse(path + ": first sample must sit at dt/2 > 0");
  for (std::size_t r = 0; r < rows; ++r) {
    const double expected = (r + 0.5) * dt;
    if (std::abs(t_s[r] - expected) > 1e-6 * dt)
      throw_parse(path + ": samples must sit on a uniform midpoint grid (row " +
                  std::to_string(r + 1) + ")");
  }
  SampledPulse pulse;
  pulse.grid = TimeGrid(dt * static_cast<double>(rows),
                        static_cast<int>(rows));
  pulse.envelope_t = std::move(env_t);
  return pulse;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t_ns,d_a,d_b,d_c,d_ab,d_ac,d_bc,d_abc,p_ms_minus1";
  for (int x = 0; x < kLogicalDim; ++x)
    out << ",p_" << bits_string(static_cast<std::uint32_t>(x), 3);
  out << '\n';
  const std::uint32_t column_masks[7] = {4, 2, 1, 6, 5, 3, 7};
  for (const TrajectorySample& s : traj.samples) {
    out << format_number(s.t_s * 1e9);
    for (const std::uint32_t mask : column_masks)
      out << ','
          << (s.phases_valid ? format_number(s.delta[mask]) : std::string("nan"));
    out << ',' << format_number(s.p_minus1);
    for (int x = 0; x < kLogicalDim; ++x)
      out << ',' << format_number(s.logical_pop[x]);
    out << '\n';
  }
}

void write_populations_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t_ns";
  static const char* kElectron[2] = {"0", "m1"};
  static const char* kNitrogen[3] = {"p1", "0", "m1"};
  static const char* kCarbon[2] = {"u", "d"};
  for (int e = 0; e < 2; ++e)
    for (int nn = 0; nn < 3; ++nn)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2)
          out << ",p_" << kElectron[e] << '_' << kNitrogen[nn] << '_'
              << kCarbon[c1] << kCarbon[c2];
  out << '\n';
  for (const TrajectorySample& s : traj.samples) {
    out << format_number(s.t_s * 1e9);
    for (int i = 0; i < kFullDim; ++i) out << ',' << format_number(s.bare_pop[i]);
    out << '\n';
  }
}

void write_history_csv(const std::string& path,
                       const std::vector<std::pair<long, double>>& history) {
  auto out = open_out(path);
  out << "eval,best_composite\n";
  for (const auto& [eval, value] : history)
    out << eval << ',' << format_number(value) << '\n';
}

bool file_has_phase_map_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_parse("cannot read file: " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line == "index,bits,phase_rad";
}

}  // namespace pf
