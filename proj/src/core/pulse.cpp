#include "pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace pf {

void PulseParams::validate() const {
  if (!(duration_s > 0.0)) throw_invalid("pulse duration must be positive");
  if (!(taper >= 0.0 && taper <= 1.0))
    throw_invalid("taper fraction must lie in [0, 1]");
  for (const Tone& tone : tones)
    if (!std::isfinite(tone.amplitude_t) || !std::isfinite(tone.freq_rad_s) ||
        !std::isfinite(tone.phase_rad))
      throw_invalid("tone parameters must be finite");
}

std::vector<double> PulseParams::pack() const {
  std::vector<double> v;
  v.reserve(3 * tones.size());
  for (const Tone& t : tones) v.push_back(t.amplitude_t);
  for (const Tone& t : tones) v.push_back(t.freq_rad_s);
  for (const Tone& t : tones) v.push_back(t.phase_rad);
  return v;
}

PulseParams PulseParams::unpack(const std::vector<double>& v,
                                double duration_s, double taper,
                                double carrier_offset_rad_s) {
  if (v.size() % 3 != 0) throw_invalid("decision vector length must be 3n");
  const std::size_t n = v.size() / 3;
  PulseParams p;
  p.duration_s = duration_s;
  p.taper = taper;
  p.carrier_offset_rad_s = carrier_offset_rad_s;
  p.tones.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.tones[i].amplitude_t = v[i];
    p.tones[i].freq_rad_s = v[n + i];
    p.tones[i].phase_rad = v[2 * n + i];
  }
  p.validate();
  return p;
}

double window(double t, double duration_s, double alpha) {
  if (!(duration_s > 0.0)) throw_invalid("window duration must be positive");
  if (t < 0.0 || t > duration_s)
    throw_invalid("window time outside [0, T]");
  if (alpha <= 0.0) return 1.0;
  const double ramp = alpha * duration_s;
  double w = 1.0;
  if (t < ramp)
    w = std::min(w, 0.5 * (1.0 - std::cos(std::numbers::pi * t / ramp)));
  if (t > duration_s - ramp)
    w = std::min(
        w, 0.5 * (1.0 - std::cos(std::numbers::pi * (duration_s - t) / ramp)));
  return w;
}

double envelope(double t, const PulseParams& p) {
  double sum = 0.0;
  for (const Tone& tone : p.tones)
    sum += tone.amplitude_t * std::cos(tone.freq_rad_s * t + tone.phase_rad);
  return window(t, p.duration_s, p.taper) * sum;
}

std::vector<double> envelope_midpoints(const PulseParams& p,
                                       const TimeGrid& grid) {
  p.validate();
  std::vector<double> out(grid.steps);
  for (int k = 0; k < grid.steps; ++k) out[k] = envelope(grid.midpoint(k), p);
  return out;
}

double slew_penalty(const std::vector<double>& samples_t, double dt_s) {
  if (samples_t.size() < 2 || !(dt_s > 0.0))
    throw_invalid("slew penalty needs at least two samples and dt > 0");
  // Slopes in mT per microsecond: (T/s) * 1e-3.
  const double scale = 1.0e-3 / dt_s;
  double acc = 0.0;
  for (std::size_t k = 1; k < samples_t.size(); ++k) {
    const double slope = (samples_t[k] - samples_t[k - 1]) * scale;
    acc += slope * slope;
  }
  return acc / static_cast<double>(samples_t.size() - 1);
}

double slew_penalty(const PulseParams& p, const TimeGrid& grid) {
  if (grid.steps < 2) throw_invalid("slew penalty needs a grid of >= 2 points");
  return slew_penalty(envelope_midpoints(p, grid), grid.dt());
}

}  // namespace pf
