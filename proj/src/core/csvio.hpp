#ifndef PHASEFILTER_CSVIO_HPP
#define PHASEFILTER_CSVIO_HPP

#include <string>
#include <vector>

#include "invariants.hpp"
#include "propagate.hpp"
#include "timegrid.hpp"
#include "walsh.hpp"

namespace pf {

// All CSV floats are written with 12 significant digits; times in ns,
// envelopes in mT, angles in rad.
std::string format_number(double v);

// Phase map: header "index,bits,phase_rad", rows in ascending index order.
void write_phase_map_csv(const std::string& path, const PhaseMap& phi);
PhaseMap read_phase_map_csv(const std::string& path);

// Invariants: header "subset_bits,subset_label,delta_rad", masks ascending.
void write_invariants_csv(const std::string& path, const InvariantSet& inv);
InvariantSet read_invariants_csv(const std::string& path);

// Pulse samples: header "t_ns,envelope", one row per step midpoint.
struct SampledPulse {
  TimeGrid grid;
  std::vector<double> envelope_t;  // tesla, one per step
};
void write_pulse_csv(const std::string& path, const TimeGrid& grid,
                     const std::vector<double>& envelope_t);
SampledPulse read_pulse_csv(const std::string& path);

// Trajectory: fixed column set with the seven unwrapped invariants, the
// m_s = -1 exposure and the eight logical populations; bare populations of
// all 24 basis states go to a separate file.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_populations_csv(const std::string& path, const Trajectory& traj);

// Search history: header "eval,best_composite".
void write_history_csv(const std::string& path,
                       const std::vector<std::pair<long, double>>& history);

// Returns true if the file's first line matches the phase-map header.
bool file_has_phase_map_header(const std::string& path);

}  // namespace pf

#endif
