#include "objective.hpp"

#include <bit>
#include <cmath>

#include "errors.hpp"

namespace pf {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

TargetSpec::TargetSpec(int n_qubits) : n(n_qubits) {
  if (n < 1 || n > 20) throw_invalid("qubit count must be in [1, 20]");
  targets.assign(std::size_t{1} << n, std::nullopt);
  weights.assign(n + 1, 0.0);
}

void TargetSpec::set_target(const SubsetMask& s, double value) {
  if (s.n != n || s.empty()) throw_invalid("bad subset for target");
  if (!std::isfinite(value)) throw_invalid("target angle must be finite");
  targets[s.bits] = value;
}

void TargetSpec::clear_target(const SubsetMask& s) {
  if (s.n != n || s.empty()) throw_invalid("bad subset for target");
  targets[s.bits] = std::nullopt;
}

double cost(const InvariantSet& inv, const TargetSpec& spec) {
  if (inv.n != spec.n) throw_invalid("qubit-count mismatch in cost");
  double total = 0.0;
  for (std::uint32_t mask = 1; mask < spec.targets.size(); ++mask) {
    const auto& target = spec.targets[mask];
    if (!target) continue;
    const double w = spec.weights[std::popcount(mask)];
    if (w == 0.0) continue;
    total += w * (1.0 - std::cos(2.0 * (inv.values[mask] - *target)));
  }
  return total;
}

std::vector<double> cost_gradient_fd(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& params, double step) {
  if (step <= 0.0) throw_invalid("finite-difference step must be positive");
  std::vector<double> grad(params.size(), 0.0);
  std::vector<double> probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    probe[i] = params[i] + step;
    const double fp = objective(probe);
    probe[i] = params[i] - step;
    const double fm = objective(probe);
    probe[i] = params[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw_numeric("objective not finite at finite-difference probe");
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

double fidelity(const Matrix& target, const Matrix& actual) {
  if (target.rows() != target.cols() || actual.rows() != actual.cols() ||
      target.rows() != actual.rows())
    throw_invalid("fidelity requires square matrices of equal dimension");
  const double d = static_cast<double>(target.rows());
  const std::complex<double> overlap = (target.adjoint() * actual).trace();
  return std::norm(overlap) / (d * d);
}

Matrix local_correction(const InvariantSet& inv, FrameKind mode) {
  const int n = inv.n;
  if (n < 1) throw_invalid("invariant set is empty");
  const std::size_t dim = std::size_t{1} << n;
  if (inv.values.size() != dim) throw_invalid("missing invariants");

  // Order-1 Walsh components of the framed map: phi_hat({j}) = -Delta_{j}.
  std::vector<double> phat(n + 1, 0.0);
  for (int j = 1; j <= n; ++j)
    phat[j] = -inv.values[SubsetMask::single(n, j).bits];

  Matrix diag = Matrix::Zero(dim, dim);
  for (std::uint32_t x = 0; x < dim; ++x) {
    double phase = 0.0;
    for (int j = 1; j <= n; ++j) {
      const int sign = ((x >> qubit_bit(n, j)) & 1u) ? -1 : 1;
      phase -= phat[j] * sign;
    }
    diag(x, x) = std::exp(kI * phase);
  }
  if (mode == FrameKind::canonical) return diag;

  // hadamard_on_a: conjugate the diagonal correction back through H on the
  // first qubit, turning its Z rotation into the X rotation that must be
  // applied physically.
  const double r = 1.0 / std::sqrt(2.0);
  Matrix out = Matrix::Zero(dim, dim);
  const std::uint32_t abit = std::uint32_t{1} << qubit_bit(n, 1);
  // H (x) I acting on both sides: out = Ha * diag * Ha.
  for (std::uint32_t row = 0; row < dim; ++row) {
    for (std::uint32_t col = 0; col < dim; ++col) {
      if ((row & ~abit) != (col & ~abit)) continue;
      std::complex<double> acc = 0.0;
      for (int mid = 0; mid < 2; ++mid) {
        const std::uint32_t m = (row & ~abit) | (mid ? abit : 0u);
        const double ha_rm = ((row & abit) && mid) ? -r : r;
        const double ha_mc = ((col & abit) && mid) ? -r : r;
        acc += ha_rm * diag(m, m) * ha_mc;
      }
      out(row, col) = acc;
    }
  }
  return out;
}

double integrated_exposure(const ExposureTrace& trace) {
  if (trace.times_s.size() != trace.p_minus1.size())
    throw_invalid("exposure trace size mismatch");
  if (trace.times_s.empty()) throw_invalid("exposure trace is empty");
  double acc = 0.0;
  for (std::size_t k = 1; k < trace.times_s.size(); ++k) {
    const double dt = trace.times_s[k] - trace.times_s[k - 1];
    if (dt <= 0.0) throw_invalid("exposure trace times must increase");
    acc += 0.5 * dt * (trace.p_minus1[k] + trace.p_minus1[k - 1]);
  }
  return acc;
}

double dephasing_from_exposure(double exposure_s, double t2_s) {
  if (t2_s <= 0.0) throw_invalid("T2 must be positive");
  return std::exp(-exposure_s / t2_s);
}

double dephasing_estimate(const ExposureTrace& trace, double t2_s) {
  return dephasing_from_exposure(integrated_exposure(trace), t2_s);
}

}  // namespace pf
