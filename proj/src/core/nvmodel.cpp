#include "nvmodel.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace pf {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Spin matrices in the Zeeman basis, highest m first.
Matrix spin_half(int axis) {
  Matrix m(2, 2);
  switch (axis) {
    case 0: m << 0, 0.5, 0.5, 0; break;
    case 1: m << 0, kI * -0.5, kI * 0.5, 0; break;
    default: m << 0.5, 0, 0, -0.5; break;
  }
  return m;
}

Matrix spin_one(int axis) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m = Matrix::Zero(3, 3);
  switch (axis) {
    case 0:
      m(0, 1) = r; m(1, 0) = r; m(1, 2) = r; m(2, 1) = r;
      break;
    case 1:
      m(0, 1) = -kI * r; m(1, 0) = kI * r;
      m(1, 2) = -kI * r; m(2, 1) = kI * r;
      break;
    default:
      m(0, 0) = 1; m(2, 2) = -1;
      break;
  }
  return m;
}

Matrix spin_matrix(int spin_doubled, int axis) {
  return spin_doubled == 2 ? spin_one(axis) : spin_half(axis);
}

double quantum_number(int spin_doubled, int idx) {
  return 0.5 * spin_doubled - idx;
}

// Embeds a single-nucleus operator into the 12-dim nuclear space.
Matrix embed_nuclear(const Matrix& op, int nucleus) {
  const std::array<int, 3> dims = {3, 2, 2};
  Matrix out = Matrix::Identity(1, 1);
  for (int j = 0; j < 3; ++j) {
    const Matrix& factor =
        (j == nucleus) ? op : Matrix(Matrix::Identity(dims[j], dims[j]));
    Matrix next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(),
                   factor.cols()) = out(r, c) * factor;
    out = std::move(next);
  }
  return out;
}

}  // namespace

void RegisterConfig::validate() const {
  if (!(gamma_e_hz_per_t > 0)) throw_invalid("electron gamma must be positive");
  if (!(b0_t > 0)) throw_invalid("static field must be positive");
  if (nuclei.size() != 3)
    throw_invalid("register needs exactly three nuclei (N, C1, C2)");
  if (nuclei[0].spin_doubled != 2)
    throw_invalid("first nucleus must be the spin-1 nitrogen");
  if (nuclei[1].spin_doubled != 1 || nuclei[2].spin_doubled != 1)
    throw_invalid("second and third nuclei must be spin-1/2 carbons");
}

RegisterConfig RegisterConfig::table_defaults() {
  RegisterConfig cfg;
  cfg.gamma_e_hz_per_t = 28.024e9;
  cfg.b0_t = 0.45;
  cfg.nuclei = {
      {"14N", 2, 3.077e6, -2.14e6, 0.0, -5.01e6},
      {"13C1", 1, 10.71e6, 2.281e6, 0.240e6, 0.0},
      {"13C2", 1, 10.71e6, -1.011e6, 0.014e6, 0.0},
  };
  return cfg;
}

DerivedFrame derive_frame(const RegisterConfig& cfg,
                          double carrier_offset_rad_s) {
  cfg.validate();
  DerivedFrame frame;
  frame.rabi_per_tesla_rad_s =
      kTwoPi * cfg.gamma_e_hz_per_t / (2.0 * std::sqrt(2.0));

  // Azimuth gauge: the single transverse magnitude is assigned to A_yz,
  // so phi_i = 0 for every nucleus.
  std::vector<double> gamma_b0_hz, omega_hz;
  for (const NucleusSpec& nuc : cfg.nuclei) {
    const double gb0 = nuc.gamma_hz_per_t * cfg.b0_t;
    const double axial = nuc.a_zz_hz + gb0;
    const double perp = nuc.a_perp_hz;
    if (axial == 0.0 && perp == 0.0)
      throw_numeric("degenerate hyperfine frame for " + nuc.species +
                    ": A_zz + gamma B0 = 0 with A_perp = 0");
    NucleusFrame nf;
    nf.phi_rad = 0.0;
    nf.theta_rad = perp == 0.0 ? 0.0 : std::atan(perp / axial);
    const double omega = std::sqrt(axial * axial + perp * perp);
    nf.omega_rad_s = kTwoPi * omega;
    frame.nuclei.push_back(nf);
    gamma_b0_hz.push_back(gb0);
    omega_hz.push_back(omega);
  }

  // Transition frequencies relative to the resonant configuration
  // m* = (m_N = +1, both carbons up). The m_s = -1 manifold's nuclear energy
  // sits at -sum_i (omega_i - gamma_i B0) m_i below the m_s = 0 one, so
  // Lambda(m) = Lambda_s + sum_i m_i (gamma_i B0 - omega_i); the carrier is
  // pinned to Lambda(m*) + offset, making Delta_e(m*) = offset.
  const std::array<double, 3> mstar = {1.0, 0.5, 0.5};
  for (int n_idx = 0; n_idx < 3; ++n_idx) {
    for (int c1 = 0; c1 < 2; ++c1) {
      for (int c2 = 0; c2 < 2; ++c2) {
        const int m = n_idx * 4 + c1 * 2 + c2;
        const std::array<double, 3> mq = {quantum_number(2, n_idx),
                                          quantum_number(1, c1),
                                          quantum_number(1, c2)};
        double rel_hz = 0.0;
        for (int i = 0; i < 3; ++i)
          rel_hz += (mq[i] - mstar[i]) * (gamma_b0_hz[i] - omega_hz[i]);
        frame.lambda_rel_rad_s[m] = kTwoPi * rel_hz;
        frame.detuning_rad_s[m] = carrier_offset_rad_s - kTwoPi * rel_hz;
      }
    }
  }

  // Lambda_s - omega_MW in the carrier convention; this is the only place
  // the bare transition frequency would have appeared.
  double lambda_off_hz = 0.0;
  for (int i = 0; i < 3; ++i)
    lambda_off_hz -= mstar[i] * (gamma_b0_hz[i] - omega_hz[i]);
  frame.lambda_offset_rad_s = kTwoPi * lambda_off_hz - carrier_offset_rad_s;
  frame.delta_e_en_rad_s = -frame.lambda_offset_rad_s;

  for (int i = 0; i < 3; ++i)
    frame.nuclei[i].delta_beat_rad_s =
        frame.nuclei[i].omega_rad_s - frame.lambda_offset_rad_s;

  // Rotated operators: I'_x = Ix, I'_y = cos(th) Iy - sin(th) Iz,
  // I'_z = sin(th) Iy + cos(th) Iz (phi = 0 gauge).
  frame.nuclear_static = Matrix::Zero(kNuclearDim, kNuclearDim);
  for (int i = 0; i < 3; ++i) {
    const int sd = cfg.nuclei[i].spin_doubled;
    const double th = frame.nuclei[i].theta_rad;
    const Matrix ix = spin_matrix(sd, 0);
    const Matrix iy = spin_matrix(sd, 1);
    const Matrix iz = spin_matrix(sd, 2);
    frame.ix_rot.push_back(embed_nuclear(ix, i));
    frame.iy_rot.push_back(
        embed_nuclear(std::cos(th) * iy - std::sin(th) * iz, i));
    frame.iz_rot.push_back(
        embed_nuclear(std::sin(th) * iy + std::cos(th) * iz, i));
    const double coeff =
        frame.nuclei[i].omega_rad_s - kTwoPi * gamma_b0_hz[i];
    frame.nuclear_static -= coeff * frame.iz_rot.back();
  }
  return frame;
}

Matrix build_hamiltonian_rabi(double t, double rabi_rad_s,
                              const DerivedFrame& frame) {
  // Upper-right electron block. The drive rotates at the bare-transition
  // detuning omega_MW - Lambda_s for every configuration; the per-m splitting
  // Delta_e(m) is produced dynamically by the static nuclear term, which
  // carries the hyperfine shifts exactly once.
  Matrix upper = Matrix::Zero(kNuclearDim, kNuclearDim);
  const std::complex<double> drive_phase =
      std::exp(kI * (frame.delta_e_en_rad_s * t));
  for (int m = 0; m < kConfigCount; ++m) upper(m, m) = drive_phase;

  Matrix w = Matrix::Zero(kNuclearDim, kNuclearDim);
  bool any_tilt = false;
  for (std::size_t i = 0; i < frame.nuclei.size(); ++i) {
    const NucleusFrame& nf = frame.nuclei[i];
    if (nf.theta_rad == 0.0) continue;
    any_tilt = true;
    const double arg = nf.delta_beat_rad_s * t - nf.phi_rad;
    w += nf.theta_rad *
         (std::cos(arg) * frame.ix_rot[i] + std::sin(arg) * frame.iy_rot[i]);
  }
  if (any_tilt)
    upper += kI * std::exp(kI * (frame.delta_e_en_rad_s * t)) * w;
  upper *= rabi_rad_s;

  Matrix h = Matrix::Zero(kFullDim, kFullDim);
  h.topRightCorner(kNuclearDim, kNuclearDim) = upper;
  h.bottomLeftCorner(kNuclearDim, kNuclearDim) = upper.adjoint();
  h.bottomRightCorner(kNuclearDim, kNuclearDim) = frame.nuclear_static;
  return h;
}

Matrix build_hamiltonian(double t, const PulseParams& p,
                         const RegisterConfig& cfg, const DerivedFrame& frame) {
  if (t < 0.0 || t > p.duration_s)
    throw_invalid("Hamiltonian time outside the pulse interval");
  const double rabi = frame.rabi_per_tesla_rad_s * envelope(t, p);
  (void)cfg;
  return build_hamiltonian_rabi(t, rabi, frame);
}

LogicalFrame LogicalFrame::make(FrameKind kind) {
  LogicalFrame frame;
  frame.kind = kind;
  for (int xa = 0; xa < 2; ++xa)
    for (int xb = 0; xb < 2; ++xb)
      for (int xc = 0; xc < 2; ++xc)
        frame.embedding[xa * 4 + xb * 2 + xc] = xa * 12 + xb * 2 + xc;
  return frame;
}

LogicalBlock logical_block(const Matrix& u_full, const LogicalFrame& frame) {
  if (u_full.rows() != kFullDim || u_full.cols() != kFullDim)
    throw_invalid("logical_block expects the 24-dim propagator");
  const double unit_dev =
      (u_full.adjoint() * u_full - Matrix::Identity(kFullDim, kFullDim))
          .cwiseAbs()
          .maxCoeff();
  if (unit_dev > 1e-6)
    throw_numeric("propagator is not unitary (deviation " +
                  std::to_string(unit_dev) + ")");
  LogicalBlock out;
  out.u_logical = Matrix(kLogicalDim, kLogicalDim);
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = 0; j < kLogicalDim; ++j)
      out.u_logical(i, j) = u_full(frame.embedding[i], frame.embedding[j]);
  out.leakage = 1.0 - (out.u_logical.adjoint() * out.u_logical).trace().real() /
                          kLogicalDim;
  return out;
}

Matrix hadamard_on_a_matrix() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix h2(2, 2);
  h2 << r, r, r, -r;
  Matrix out = Matrix::Zero(kLogicalDim, kLogicalDim);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block(i * 4, j * 4, 4, 4) = h2(i, j) * Matrix::Identity(4, 4);
  return out;
}

FramedPhases framed_diagonal_phases(const Matrix& u_logical,
                                    const LogicalFrame& frame) {
  if (u_logical.rows() != kLogicalDim || u_logical.cols() != kLogicalDim)
    throw_invalid("framed_diagonal_phases expects an 8-dim block");
  Matrix framed = u_logical;
  if (frame.kind == FrameKind::hadamard_on_a) {
    const Matrix ha = hadamard_on_a_matrix();
    framed = ha * u_logical * ha;
  }
  FramedPhases out;
  out.phases = PhaseMap::zero(3);
  for (int x = 0; x < kLogicalDim; ++x) {
    const std::complex<double> d = framed(x, x);
    if (std::abs(d) < 1e-6)
      throw_numeric("ill-conditioned diagonal phase at basis state " +
                    std::to_string(x));
    out.phases.values[x] = std::arg(d);
    out.diag_power += std::norm(d) / kLogicalDim;
  }
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = 0; j < kLogicalDim; ++j)
      if (i != j) out.off_diag = std::max(out.off_diag, std::abs(framed(i, j)));
  return out;
}

}  // namespace pf
