#ifndef PHASEFILTER_TIMEGRID_HPP
#define PHASEFILTER_TIMEGRID_HPP

#include "errors.hpp"

namespace pf {

// Uniform propagation grid over [0, T]; steps are sampled at midpoints.
struct TimeGrid {
  double duration_s = 0.0;
  int steps = 0;

  TimeGrid() = default;
  TimeGrid(double duration, int n_steps)
      : duration_s(duration), steps(n_steps) {
    if (!(duration >= 0.0)) throw_invalid("grid duration must be >= 0");
    if (n_steps < 1) throw_invalid("grid needs at least one step");
  }
  double dt() const { return duration_s / steps; }
  double midpoint(int k) const { return (k + 0.5) * dt(); }
};

}  // namespace pf

#endif
