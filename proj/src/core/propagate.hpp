#ifndef PHASEFILTER_PROPAGATE_HPP
#define PHASEFILTER_PROPAGATE_HPP

#include <span>
#include <vector>

#include "nvmodel.hpp"
#include "timegrid.hpp"

namespace pf {

// Time-ordered propagation of the 24-dim register. Each step exponentiates
// the Hamiltonian sampled at the step midpoint, via unitary diagonalization
// of the Hermitian generator (second order in dt, unitary to rounding).
//
// The Hamiltonian's structural sparsity splits the register into independent
// sectors (with the tabulated parameters, the three nitrogen manifolds never
// couple); steps are exponentiated per sector, which is what makes objective
// evaluations cheap enough for derivative-free search budgets.
class Propagator {
 public:
  Propagator(const RegisterConfig& cfg, const DerivedFrame& frame,
             const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }
  int sector_count() const { return static_cast<int>(sectors_.size()); }
  const std::vector<int>& sector_indices(int s) const { return sectors_[s]; }

  // Sectors that intersect the logical embedding; propagating exactly these
  // suffices to evaluate the logical block.
  std::vector<int> sectors_touching(const LogicalFrame& lf) const;

  // Assembles the embedding block from per-sector unitaries (indexed by
  // sector id; only sectors touching the embedding are read). Entries that
  // connect different sectors are structural zeros.
  Matrix assemble_block(const LogicalFrame& lf,
                        const std::vector<Matrix>& sector_unitaries) const;

  // Rabi rate (rad/s) at each midpoint, from a tesla-valued envelope sample.
  std::vector<double> rabi_from_envelope(std::span<const double> env_t) const;

  // Product of step exponentials for steps [k0, k1) within one sector.
  Matrix propagate_sector(int sector, std::span<const double> rabi, int k0,
                          int k1) const;

  // Cumulative unitaries over the whole grid, sampled every `stride` steps
  // and at the end (the final entry is the full product).
  std::vector<Matrix> propagate_sector_snapshots(int sector,
                                                 std::span<const double> rabi,
                                                 int stride) const;

  // Full 24-dim propagator over steps [k0, k1).
  Matrix propagate_full(std::span<const double> rabi, int k0, int k1) const;

 private:
  friend class TrajectoryRunner;
  Matrix step_unitary(int sector, double rabi_k, int k) const;

  TimeGrid grid_;
  double rabi_per_tesla_ = 0;
  std::vector<std::vector<int>> sectors_;
  std::vector<std::pair<int, int>> locate_;  // full index -> (sector, offset)
  // Per sector: static block and per-step drive coefficient blocks, so a step
  // Hamiltonian is H_k = rabi_k * drive_[s][k] + static_[s].
  std::vector<Matrix> static_;
  std::vector<std::vector<Matrix>> drive_;
};

// U over the whole grid for a parametric pulse.
Matrix propagate(const PulseParams& p, const RegisterConfig& cfg,
                 const DerivedFrame& frame, const TimeGrid& grid);

// Replay variant: envelope given directly as midpoint samples (tesla).
Matrix propagate_sampled(std::span<const double> envelope_t,
                         const RegisterConfig& cfg, const DerivedFrame& frame,
                         const TimeGrid& grid);

struct TrajectorySample {
  double t_s = 0;
  std::array<double, 8> delta{};  // unwrapped Delta_S, indexed by mask bits
  bool phases_valid = true;
  double off_diag = 0;
  double p_minus1 = 0;
  std::array<double, kLogicalDim> logical_pop{};
  std::array<double, kFullDim> bare_pop{};
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  ExposureTrace exposure;  // p_-1 on the full step grid
  Matrix u_final;          // 24-dim propagator at T
  int invalid_samples = 0;
};

// Time-resolved record: cumulative propagator, framed logical invariants
// (nearest-branch unwrapped per diagonal entry), basis populations of the
// evolving state, and the m_s = -1 exposure. The initial state follows the
// frame kind: electron |+> for the canonical frame, |0> for hadamard_on_a;
// both carbons |+>, nitrogen m_I = +1.
Trajectory trajectory(const PulseParams& p, const RegisterConfig& cfg,
                      const DerivedFrame& frame, const LogicalFrame& lframe,
                      const TimeGrid& grid, int stride);

Trajectory trajectory_sampled(std::span<const double> envelope_t,
                              const RegisterConfig& cfg,
                              const DerivedFrame& frame,
                              const LogicalFrame& lframe, const TimeGrid& grid,
                              int stride);

struct ConvergenceReport {
  double op_norm_diff = 0;
  double tolerance = 1e-6;
  bool pass = false;
};

// Compares the propagator at dt and dt/2 in operator norm.
ConvergenceReport convergence_test(const PulseParams& p,
                                   const RegisterConfig& cfg,
                                   const DerivedFrame& frame,
                                   const TimeGrid& grid);

}  // namespace pf

#endif
