#ifndef PHASEFILTER_PULSE_HPP
#define PHASEFILTER_PULSE_HPP

#include <vector>

#include "timegrid.hpp"

namespace pf {

// One envelope tone. Amplitudes are in tesla-equivalent control units; the
// tone frequencies modulate the envelope around the (implicit) carrier.
struct Tone {
  double amplitude_t = 0.0;  // tesla
  double freq_rad_s = 0.0;
  double phase_rad = 0.0;
};

struct PulseParams {
  std::vector<Tone> tones;
  double duration_s = 0.0;
  double taper = 0.15;             // Tukey taper fraction alpha in [0, 1]
  double carrier_offset_rad_s = 0.0;  // drive carrier relative to the
                                      // resonant-configuration transition

  void validate() const;

  // Flat decision vector in the fixed layout (a_1..a_n, w_1..w_n, f_1..f_n).
  std::vector<double> pack() const;
  static PulseParams unpack(const std::vector<double>& v, double duration_s,
                            double taper, double carrier_offset_rad_s = 0.0);
};

// Tapered-cosine (Tukey) window: half-cosine ramps of width alpha*T at both
// edges, flat at 1 in between, w(0) = w(T) = 0.
double window(double t, double duration_s, double alpha);

// E(t) = w_alpha(t) sum_i a_i cos(w_i t + f_i).
double envelope(double t, const PulseParams& p);

// Mean squared slope of the sampled envelope, in (mT / us)^2. The scale keeps
// typical values within a few orders of magnitude of the phase cost, which is
// what the default lambda_slew is calibrated against.
double slew_penalty(const std::vector<double>& samples_t, double dt_s);
double slew_penalty(const PulseParams& p, const TimeGrid& grid);

// Envelope sampled at the grid midpoints, one value per step.
std::vector<double> envelope_midpoints(const PulseParams& p,
                                       const TimeGrid& grid);

}  // namespace pf

#endif
