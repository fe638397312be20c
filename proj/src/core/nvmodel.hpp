#ifndef PHASEFILTER_NVMODEL_HPP
#define PHASEFILTER_NVMODEL_HPP

#include <array>
#include <string>
#include <vector>

#include "objective.hpp"
#include "pulse.hpp"
#include "walsh.hpp"

namespace pf {

// Basis layout, fixed once:
//   * electron qubit manifold {|0>, |-1>}: index e in {0, 1};
//   * nitrogen (spin 1) ordered m_I = +1, 0, -1: index 0, 1, 2;
//   * each carbon (spin 1/2) ordered m = +1/2, -1/2: index 0, 1;
//   * nuclear configuration m = n_idx * 4 + c1 * 2 + c2 (12 states);
//   * full-space index = e * 12 + m (24 states).
// Logical qubits: A = electron, B = C1, C = C2, with the nitrogen spectator
// pinned to m_I = +1, so logical |x_A x_B x_C> sits at x_A*12 + x_B*2 + x_C.
constexpr int kElectronDim = 2;
constexpr int kNuclearDim = 12;
constexpr int kFullDim = 24;
constexpr int kLogicalDim = 8;
constexpr int kConfigCount = 12;

struct NucleusSpec {
  std::string species;
  int spin_doubled = 1;       // 2*I: 2 for spin-1 nitrogen, 1 for spin-1/2
  double gamma_hz_per_t = 0;  // gyromagnetic ratio / 2pi
  double a_zz_hz = 0;         // longitudinal hyperfine component
  double a_perp_hz = 0;       // transverse hyperfine magnitude
  double q_hz = 0;            // quadrupole constant (spectator bookkeeping)
};

struct RegisterConfig {
  double gamma_e_hz_per_t = 28.024e9;
  double b0_t = 0.45;
  std::vector<NucleusSpec> nuclei;  // nitrogen, carbon 1, carbon 2

  void validate() const;
  static RegisterConfig table_defaults();
};

// Per-nucleus derived quantities of the rotated hyperfine frame.
struct NucleusFrame {
  double theta_rad = 0;        // polar misalignment angle
  double phi_rad = 0;          // azimuth, tan(phi) = A_xz / A_yz
  double omega_rad_s = 0;      // precession frequency in the m_s = -1 manifold
  double delta_beat_rad_s = 0; // beat frequency relative to the carrier frame
};

// Frame data derived from a register configuration and a carrier choice. The
// carrier is pinned to the transition of the resonant configuration
// m* = (m_N = +1, both carbons up); all electron frequencies are stored
// relative to Lambda(m*), so the absolute transition frequency never enters.
struct DerivedFrame {
  std::vector<NucleusFrame> nuclei;
  std::array<double, kConfigCount> lambda_rel_rad_s{};  // Lambda(m) - Lambda(m*)
  std::array<double, kConfigCount> detuning_rad_s{};    // Delta_e(m)
  double lambda_offset_rad_s = 0;  // Lambda_s - omega_MW in the carrier frame
  double delta_e_en_rad_s = 0;     // detuning used by the electron-nuclear term

  // Rotated nuclear operators embedded in the 12-dim nuclear space.
  std::vector<Matrix> ix_rot, iy_rot, iz_rot;
  Matrix nuclear_static;  // -sum_i (omega_i - gamma_i B0) I'_iz

  double rabi_per_tesla_rad_s = 0;  // Omega = gamma_e E / (2 sqrt 2)
};

// Computes angles, frequencies and operator blocks per the rotated-frame
// construction. Throws a numeric error for the degenerate case
// A_zz + gamma B0 = 0 with A_perp = 0.
DerivedFrame derive_frame(const RegisterConfig& cfg,
                          double carrier_offset_rad_s = 0.0);

// H(t) for the working model, 24 x 24, Hermitian by construction:
//   Omega(t) sum_m [sx cos(De(m) t) - sy sin(De(m) t)] (x) |m><m|
// - Omega(t) [qx sin(De t) + qy cos(De t)] (x)
//       sum_i theta_i [I'_ix cos(d_i t - phi_i) + I'_iy sin(d_i t - phi_i)]
// + P_-1 (x) nuclear_static.
Matrix build_hamiltonian(double t, const PulseParams& p,
                         const RegisterConfig& cfg, const DerivedFrame& frame);

// Same Hamiltonian with the Rabi rate supplied directly (rad/s).
Matrix build_hamiltonian_rabi(double t, double rabi_rad_s,
                              const DerivedFrame& frame);

struct LogicalFrame {
  FrameKind kind = FrameKind::canonical;
  std::array<int, kLogicalDim> embedding{};  // full-space index per logical state

  static LogicalFrame make(FrameKind kind);
};

// U_L = E^dag U E and the leakage 1 - Tr(U_L^dag U_L)/8.
struct LogicalBlock {
  Matrix u_logical;
  double leakage = 0;
};
LogicalBlock logical_block(const Matrix& u_full, const LogicalFrame& frame);

// Diagonal phases of the (optionally Hadamard-framed) logical block. Throws a
// numeric error if any diagonal magnitude falls below 1e-6.
struct FramedPhases {
  PhaseMap phases;      // n = 3
  double off_diag = 0;  // largest off-diagonal magnitude, diagonality check
  double diag_power = 0;  // mean |diagonal|^2; 1 iff the framed block is a
                          // diagonal unitary, used as its non-unitarity
};
FramedPhases framed_diagonal_phases(const Matrix& u_logical,
                                    const LogicalFrame& frame);

// Hadamard on qubit A (x) identity, 8 x 8; the frame conjugation operator.
Matrix hadamard_on_a_matrix();

}  // namespace pf

#endif
