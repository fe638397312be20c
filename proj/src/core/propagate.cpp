#include "propagate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "errors.hpp"
#include "invariants.hpp"

namespace pf {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// Connected components of the structural coupling pattern.
std::vector<std::vector<int>> split_sectors(const Matrix& pattern) {
  std::vector<int> parent(kFullDim);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (int i = 0; i < kFullDim; ++i)
    for (int j = i + 1; j < kFullDim; ++j)
      if (pattern(i, j) != 0.0 || pattern(j, i) != 0.0) unite(i, j);
  std::vector<std::vector<int>> sectors;
  std::vector<int> root_to_sector(kFullDim, -1);
  for (int i = 0; i < kFullDim; ++i) {
    const int r = find(i);
    if (root_to_sector[r] < 0) {
      root_to_sector[r] = static_cast<int>(sectors.size());
      sectors.emplace_back();
    }
    sectors[root_to_sector[r]].push_back(i);
  }
  return sectors;
}

Matrix restrict_to(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      out(r, c) = m(idx[r], idx[c]);
  return out;
}

double largest_singular_value(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

}  // namespace

Propagator::Propagator(const RegisterConfig& cfg, const DerivedFrame& frame,
                       const TimeGrid& grid)
    : grid_(grid), rabi_per_tesla_(frame.rabi_per_tesla_rad_s) {
  cfg.validate();

  // Structural pattern: drive couples the electron states within every
  // nuclear configuration; the electron-nuclear term adds the supports of the
  // tilted transverse operators; the static term adds the I'_z supports.
  Matrix pattern = Matrix::Zero(kFullDim, kFullDim);
  for (int m = 0; m < kConfigCount; ++m)
    pattern(m, kNuclearDim + m) = 1.0;
  for (std::size_t i = 0; i < frame.nuclei.size(); ++i) {
    Matrix nuc = frame.iz_rot[i].cwiseAbs();
    if (frame.nuclei[i].theta_rad != 0.0)
      nuc += frame.ix_rot[i].cwiseAbs() + frame.iy_rot[i].cwiseAbs();
    for (int r = 0; r < kNuclearDim; ++r)
      for (int c = 0; c < kNuclearDim; ++c)
        if (nuc(r, c) != 0.0) {
          pattern(kNuclearDim + r, kNuclearDim + c) = 1.0;
          if (frame.nuclei[i].theta_rad != 0.0)
            pattern(r, kNuclearDim + c) = 1.0;  // via the e-n modulation
        }
  }
  sectors_ = split_sectors(pattern);
  locate_.assign(kFullDim, {-1, -1});
  for (std::size_t s = 0; s < sectors_.size(); ++s)
    for (std::size_t off = 0; off < sectors_[s].size(); ++off)
      locate_[sectors_[s][off]] = {static_cast<int>(s),
                                   static_cast<int>(off)};

  // Tabulate the rabi-linear step coefficients once per grid; the envelope
  // enters later as a scalar per step.
  static_.reserve(sectors_.size());
  drive_.resize(sectors_.size());
  Matrix h_static = Matrix::Zero(kFullDim, kFullDim);
  h_static.bottomRightCorner(kNuclearDim, kNuclearDim) = frame.nuclear_static;
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    static_.push_back(restrict_to(h_static, sectors_[s]));
    drive_[s].reserve(grid_.steps);
  }
  for (int k = 0; k < grid_.steps; ++k) {
    const Matrix coeff = build_hamiltonian_rabi(grid_.midpoint(k), 1.0, frame) -
                         h_static;
    for (std::size_t s = 0; s < sectors_.size(); ++s)
      drive_[s].push_back(restrict_to(coeff, sectors_[s]));
  }
}

std::vector<int> Propagator::sectors_touching(const LogicalFrame& lf) const {
  std::vector<int> out;
  for (int idx : lf.embedding) {
    const int s = locate_[idx].first;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

Matrix Propagator::assemble_block(
    const LogicalFrame& lf, const std::vector<Matrix>& sector_unitaries) const {
  Matrix block = Matrix::Zero(kLogicalDim, kLogicalDim);
  for (int r = 0; r < kLogicalDim; ++r) {
    const auto [sr, offr] = locate_[lf.embedding[r]];
    for (int c = 0; c < kLogicalDim; ++c) {
      const auto [sc, offc] = locate_[lf.embedding[c]];
      if (sr == sc) block(r, c) = sector_unitaries[sr](offr, offc);
    }
  }
  return block;
}

std::vector<double> Propagator::rabi_from_envelope(
    std::span<const double> env_t) const {
  if (static_cast<int>(env_t.size()) != grid_.steps)
    throw_invalid("envelope sample count must equal the grid step count");
  std::vector<double> rabi(env_t.size());
  for (std::size_t k = 0; k < env_t.size(); ++k) {
    if (!std::isfinite(env_t[k]))
      throw_numeric("non-finite envelope sample");
    rabi[k] = rabi_per_tesla_ * env_t[k];
  }
  return rabi;
}

Matrix Propagator::step_unitary(int sector, double rabi_k, int k) const {
  const Matrix h = rabi_k * drive_[sector][k] + static_[sector];
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw_numeric("eigendecomposition failed in propagation step");
  const auto phases =
      (-grid_.dt() * es.eigenvalues().array()).unaryExpr([](double ph) {
        return std::exp(kI * ph);
      });
  return es.eigenvectors() * phases.matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix Propagator::propagate_sector(int sector, std::span<const double> rabi,
                                    int k0, int k1) const {
  const std::size_t dim = sectors_[sector].size();
  Matrix u = Matrix::Identity(dim, dim);
  for (int k = k0; k < k1; ++k) u = step_unitary(sector, rabi[k], k) * u;
  return u;
}

std::vector<Matrix> Propagator::propagate_sector_snapshots(
    int sector, std::span<const double> rabi, int stride) const {
  if (stride < 1) throw_invalid("stride must be >= 1");
  const std::size_t dim = sectors_[sector].size();
  std::vector<Matrix> snapshots;
  snapshots.reserve(grid_.steps / stride + 2);
  Matrix u = Matrix::Identity(dim, dim);
  for (int k = 0; k < grid_.steps; ++k) {
    u = step_unitary(sector, rabi[k], k) * u;
    if ((k + 1) % stride == 0 || k + 1 == grid_.steps)
      snapshots.push_back(u);
  }
  if (snapshots.empty()) snapshots.push_back(u);
  return snapshots;
}

Matrix Propagator::propagate_full(std::span<const double> rabi, int k0,
                                  int k1) const {
  Matrix u = Matrix::Zero(kFullDim, kFullDim);
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const Matrix us = propagate_sector(static_cast<int>(s), rabi, k0, k1);
    for (std::size_t r = 0; r < sectors_[s].size(); ++r)
      for (std::size_t c = 0; c < sectors_[s].size(); ++c)
        u(sectors_[s][r], sectors_[s][c]) = us(r, c);
  }
  return u;
}

Matrix propagate(const PulseParams& p, const RegisterConfig& cfg,
                 const DerivedFrame& frame, const TimeGrid& grid) {
  const Propagator prop(cfg, frame, grid);
  const auto rabi = prop.rabi_from_envelope(envelope_midpoints(p, grid));
  return prop.propagate_full(rabi, 0, grid.steps);
}

Matrix propagate_sampled(std::span<const double> envelope_t,
                         const RegisterConfig& cfg, const DerivedFrame& frame,
                         const TimeGrid& grid) {
  const Propagator prop(cfg, frame, grid);
  const auto rabi = prop.rabi_from_envelope(envelope_t);
  return prop.propagate_full(rabi, 0, grid.steps);
}

namespace {

Vector initial_state(FrameKind kind) {
  // Electron |+> (canonical) or |0> (hadamard frame); nitrogen m_I = +1;
  // both carbons |+>.
  Vector psi = Vector::Zero(kFullDim);
  const double quarter = 0.5;  // (1/sqrt2)^2 per carbon pair amplitude
  for (int xb = 0; xb < 2; ++xb) {
    for (int xc = 0; xc < 2; ++xc) {
      if (kind == FrameKind::canonical) {
        const double amp = quarter / std::sqrt(2.0);
        psi(0 * 12 + xb * 2 + xc) = amp;
        psi(1 * 12 + xb * 2 + xc) = amp;
      } else {
        psi(0 * 12 + xb * 2 + xc) = quarter;
      }
    }
  }
  return psi;
}

// Nearest-branch continuation of a principal-value phase.
double unwrap_near(double raw, double prev) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return raw + two_pi * std::round((prev - raw) / two_pi);
}

}  // namespace

class TrajectoryRunner {
 public:
  static Trajectory run(const Propagator& prop, const LogicalFrame& lframe,
                        std::span<const double> rabi, int stride) {
    if (stride < 1) throw_invalid("stride must be >= 1");
    const TimeGrid& grid = prop.grid();
    Trajectory traj;
    traj.exposure.times_s.reserve(grid.steps + 1);
    traj.exposure.p_minus1.reserve(grid.steps + 1);

    // Per-sector cumulative propagators plus the evolving state.
    std::vector<Matrix> u_sec;
    for (int s = 0; s < prop.sector_count(); ++s)
      u_sec.push_back(Matrix::Identity(prop.sector_indices(s).size(),
                                       prop.sector_indices(s).size()));
    Vector psi = initial_state(lframe.kind);

    std::array<double, kLogicalDim> prev_phase{};
    bool have_prev = false;

    auto p_minus1_of = [&](const Vector& v) {
      double acc = 0.0;
      for (int i = kNuclearDim; i < kFullDim; ++i) acc += std::norm(v(i));
      return acc;
    };

    auto record_sample = [&](int k_done) {
      TrajectorySample sample;
      sample.t_s = k_done * grid.dt();
      sample.p_minus1 = p_minus1_of(psi);
      for (int i = 0; i < kFullDim; ++i) sample.bare_pop[i] = std::norm(psi(i));
      for (int l = 0; l < kLogicalDim; ++l)
        sample.logical_pop[l] = std::norm(psi(lframe.embedding[l]));

      // Logical block straight from the sector propagators.
      const Matrix ul = prop.assemble_block(lframe, u_sec);
      try {
        const FramedPhases fp = framed_diagonal_phases(ul, lframe);
        sample.off_diag = fp.off_diag;
        std::array<double, kLogicalDim> unwrapped{};
        for (int x = 0; x < kLogicalDim; ++x)
          unwrapped[x] = have_prev
                             ? unwrap_near(fp.phases.values[x], prev_phase[x])
                             : fp.phases.values[x];
        prev_phase = unwrapped;
        have_prev = true;
        const PhaseMap continuous(3, {unwrapped.begin(), unwrapped.end()});
        const InvariantSet inv = all_invariants(continuous);
        for (std::uint32_t mask = 1; mask < 8; ++mask)
          sample.delta[mask] = inv.values[mask];
      } catch (const Error&) {
        sample.phases_valid = false;
        if (have_prev)
          for (std::uint32_t mask = 1; mask < 8; ++mask)
            sample.delta[mask] =
                traj.samples.empty() ? 0.0 : traj.samples.back().delta[mask];
        ++traj.invalid_samples;
      }
      traj.samples.push_back(std::move(sample));
    };

    traj.exposure.times_s.push_back(0.0);
    traj.exposure.p_minus1.push_back(p_minus1_of(psi));
    record_sample(0);

    for (int k = 0; k < grid.steps; ++k) {
      for (int s = 0; s < prop.sector_count(); ++s) {
        const Matrix step = prop.step_unitary(s, rabi[k], k);
        u_sec[s] = step * u_sec[s];
        const auto& idx = prop.sector_indices(s);
        Vector sub(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) sub(r) = psi(idx[r]);
        sub = step * sub;
        for (std::size_t r = 0; r < idx.size(); ++r) psi(idx[r]) = sub(r);
      }
      traj.exposure.times_s.push_back((k + 1) * grid.dt());
      traj.exposure.p_minus1.push_back(p_minus1_of(psi));
      if ((k + 1) % stride == 0 || k + 1 == grid.steps) record_sample(k + 1);
    }

    traj.u_final = Matrix::Zero(kFullDim, kFullDim);
    for (int s = 0; s < prop.sector_count(); ++s) {
      const auto& idx = prop.sector_indices(s);
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
          traj.u_final(idx[r], idx[c]) = u_sec[s](r, c);
    }
    return traj;
  }
};

Trajectory trajectory(const PulseParams& p, const RegisterConfig& cfg,
                      const DerivedFrame& frame, const LogicalFrame& lframe,
                      const TimeGrid& grid, int stride) {
  const Propagator prop(cfg, frame, grid);
  const auto rabi = prop.rabi_from_envelope(envelope_midpoints(p, grid));
  return TrajectoryRunner::run(prop, lframe, rabi, stride);
}

Trajectory trajectory_sampled(std::span<const double> envelope_t,
                              const RegisterConfig& cfg,
                              const DerivedFrame& frame,
                              const LogicalFrame& lframe, const TimeGrid& grid,
                              int stride) {
  const Propagator prop(cfg, frame, grid);
  const auto rabi = prop.rabi_from_envelope(envelope_t);
  return TrajectoryRunner::run(prop, lframe, rabi, stride);
}

ConvergenceReport convergence_test(const PulseParams& p,
                                   const RegisterConfig& cfg,
                                   const DerivedFrame& frame,
                                   const TimeGrid& grid) {
  const Matrix u_coarse = propagate(p, cfg, frame, grid);
  const TimeGrid fine(grid.duration_s, grid.steps * 2);
  const Matrix u_fine = propagate(p, cfg, frame, fine);
  ConvergenceReport report;
  report.op_norm_diff = largest_singular_value(u_coarse - u_fine);
  report.pass = report.op_norm_diff <= report.tolerance;
  return report;
}

}  // namespace pf
