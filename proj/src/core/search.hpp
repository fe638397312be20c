#ifndef PHASEFILTER_SEARCH_HPP
#define PHASEFILTER_SEARCH_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "objective.hpp"
#include "propagate.hpp"

namespace pf {

enum class SearchMethod { derivative_free, finite_difference_gradient };

struct PulseShape {
  double duration_s = 1500e-9;
  double taper = 0.15;
  int tone_count = 8;
  double amplitude_limit_t = 5e-3;      // |a_i| bound
  double freq_band_rad_s = 2.0 * 3.14159265358979323846 * 10e6;  // |w_i| bound
  double carrier_offset_rad_s = 0.0;
};

struct SearchSpec {
  TargetSpec target;
  FrameKind frame_kind = FrameKind::canonical;
  PulseShape shape;
  long budget = 20000;  // objective evaluations per restart
  std::uint64_t seed = 0;
  int restarts = 4;
  double lambda_leakage = 10.0;
  double lambda_unitarity = 10.0;
  double lambda_slew = 1e-3;
  double stop_composite = 1e-4;
  SearchMethod method = SearchMethod::derivative_free;
  int threads = 0;  // 0 = hardware default, capped by PHASEFILTER_THREADS
};

struct Evaluation {
  double composite = 0;
  double cost_only = 0;        // from the final snapshot's principal phases
  double cost_unwrapped = 0;   // same cost on time-unwrapped final invariants
  double leakage = 0;
  double non_unitarity = 0;
  double slew = 0;             // (mT/us)^2
  double fidelity_raw = 0;     // vs target, before local correction
  double fidelity_corrected = 0;
  bool ok = true;              // false when propagation / phases failed
  std::string failure;
};

class SearchContext;

// Full pipeline for one candidate: propagate -> logical block -> framed
// phases -> invariants -> cost, plus the weighted leakage, non-unitarity and
// slew penalties. Failures surface as an infinite composite with ok = false.
Evaluation evaluate(const std::vector<double>& params,
                    const SearchContext& ctx);

// Everything fixed across evaluations: register model, logical frame, grid
// and the per-step coefficient tables. Reentrant; candidates may be
// evaluated concurrently against one shared context.
class SearchContext {
 public:
  SearchContext(SearchSpec spec, const RegisterConfig& cfg,
                const TimeGrid& grid);

  const SearchSpec& spec() const { return spec_; }
  const RegisterConfig& config() const { return cfg_; }
  const DerivedFrame& frame() const { return frame_; }
  const LogicalFrame& logical_frame() const { return lframe_; }
  const TimeGrid& grid() const { return grid_; }
  const Propagator& propagator() const { return *prop_; }
  const Matrix& target_unitary() const { return target_unitary_; }

  // Bounds of the flat decision vector (a..., w..., f...).
  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;

  PulseParams make_pulse(const std::vector<double>& params) const;

 private:
  SearchSpec spec_;
  RegisterConfig cfg_;
  DerivedFrame frame_;
  LogicalFrame lframe_;
  TimeGrid grid_;
  std::unique_ptr<Propagator> prop_;
  std::vector<int> logical_sectors_;
  Matrix target_unitary_;

  friend Evaluation evaluate(const std::vector<double>&, const SearchContext&);
};

struct SearchResult {
  std::vector<double> best_params;
  PulseParams best_pulse;
  Evaluation best_eval;
  std::vector<std::pair<long, double>> history;  // (eval index, best-so-far)
  long evaluations = 0;
  int restarts_run = 0;
  std::string termination;
};

// Bounded, seeded derivative-free search (CMA-style evolution strategy with
// restarts) or projected finite-difference descent, per spec.method.
// Identical spec + seed reproduce identical results; candidate batches are
// evaluated concurrently but merged in deterministic index order.
SearchResult optimize(const SearchContext& ctx);

struct GradientCheckReport {
  std::vector<double> grad_coarse;
  std::vector<double> grad_fine;
  double worst_ratio = 1.0;
  bool pass = false;
};

// Compares directional finite differences at two relative step sizes
// (1e-5, 1e-6); consistency ratio within [0.5, 2] passes.
GradientCheckReport gradient_check(const SearchContext& ctx,
                                   const std::vector<double>& params);

}  // namespace pf

#endif
