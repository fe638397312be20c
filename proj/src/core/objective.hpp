#ifndef PHASEFILTER_OBJECTIVE_HPP
#define PHASEFILTER_OBJECTIVE_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "invariants.hpp"

namespace pf {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Per-subset target angles (radians) and per-order weights for the control
// cost. An absent target means the subset is unconstrained and contributes
// no term, which is not the same as a target of zero.
struct TargetSpec {
  int n = 0;
  std::vector<std::optional<double>> targets;  // size 2^n, index = mask bits
  std::vector<double> weights;                 // size n + 1, index = |S|

  explicit TargetSpec(int n_qubits);
  TargetSpec() = default;
  void set_target(const SubsetMask& s, double value);
  void clear_target(const SubsetMask& s);
};

// J = sum over constrained S of w_|S| [1 - cos(2 (Delta_S - Delta*_S))].
// pi-periodic in each invariant; zero iff every constrained invariant matches
// its target mod pi.
double cost(const InvariantSet& inv, const TargetSpec& spec);

// Central finite differences of an arbitrary scalar objective; used for
// gradient checks and the finite-difference search mode.
std::vector<double> cost_gradient_fd(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& params, double step);

// |Tr(target^dag actual)|^2 / d^2; global-phase invariant, 1 iff equal up to
// a phase.
double fidelity(const Matrix& target, const Matrix& actual);

enum class FrameKind { canonical, hadamard_on_a };

// Single-qubit phase correction, built operationally: the diagonal unitary
// whose phases cancel the order-1 Walsh components of the framed phase map
// exactly. For the hadamard_on_a frame the diagonal correction is conjugated
// back through the Hadamard on qubit a, so the returned matrix lives in the
// computational basis in both modes.
Matrix local_correction(const InvariantSet& inv, FrameKind mode);

// Time-resolved population of the electronic m_s = -1 manifold.
struct ExposureTrace {
  std::vector<double> times_s;
  std::vector<double> p_minus1;
};

// Trapezoidal integral of p_minus1 over the trace, in seconds.
double integrated_exposure(const ExposureTrace& trace);

// D = exp[-(1/T2) integral p_minus1 dt].
double dephasing_estimate(const ExposureTrace& trace, double t2_s);
double dephasing_from_exposure(double exposure_s, double t2_s);

}  // namespace pf

#endif
