// Independent test oracles. These deliberately avoid the library's production
// code paths: the transform is the direct quadratic definition sum, matrix
// exponentials use closed-form axis-angle identities, and random maps come
// from a local generator.
#ifndef PHASEFILTER_TESTS_ORACLES_HPP
#define PHASEFILTER_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "walsh.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXcd;
const std::complex<double> kI{0.0, 1.0};

// chi_S(x) straight from the product definition over qubits.
inline int character(int n, std::uint32_t s_bits, std::uint32_t x) {
  int sign = 1;
  for (int qubit = 1; qubit <= n; ++qubit) {
    const int bit = n - qubit;
    if (((s_bits >> bit) & 1u) && ((x >> bit) & 1u)) sign = -sign;
  }
  return sign;
}

// Direct O(4^n) Walsh transform.
inline std::vector<double> direct_transform(const pf::PhaseMap& phi) {
  const std::size_t dim = phi.values.size();
  std::vector<double> coeffs(dim, 0.0);
  for (std::uint32_t s = 0; s < dim; ++s) {
    double acc = 0.0;
    for (std::uint32_t x = 0; x < dim; ++x)
      acc += character(phi.n, s, x) * phi.values[x];
    coeffs[s] = acc / static_cast<double>(dim);
  }
  return coeffs;
}

inline pf::PhaseMap random_map(int n, std::uint64_t seed, double scale = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> values(std::size_t{1} << n);
  for (double& v : values) v = dist(rng);
  return pf::PhaseMap(n, std::move(values));
}

// Map c * chi_R as a phase map.
inline pf::PhaseMap character_map(int n, std::uint32_t r_bits, double c) {
  std::vector<double> values(std::size_t{1} << n);
  for (std::uint32_t x = 0; x < values.size(); ++x)
    values[x] = c * character(n, r_bits, x);
  return pf::PhaseMap(n, std::move(values));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

inline Matrix pauli(char which) {
  Matrix m(2, 2);
  switch (which) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, -kI, kI, 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

// exp(i angle P) for an involutory operator (P^2 = I).
inline Matrix exp_involutory(double angle, const Matrix& p) {
  return std::cos(angle) * Matrix::Identity(p.rows(), p.cols()) +
         kI * std::sin(angle) * p;
}

// Closed-form exp(-i phi n.S) for spin-1/2 (axis-angle).
inline Matrix rot_spin_half(double phi, double ny, double nz) {
  const Matrix n_dot_sigma = ny * pauli('y') + nz * pauli('z');
  return std::cos(phi / 2) * Matrix::Identity(2, 2) -
         kI * std::sin(phi / 2) * (n_dot_sigma);
}

// Closed-form exp(-i phi n.J) for spin-1, using (n.J)^3 = n.J.
inline Matrix rot_spin_one(double phi, double ny, double nz) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix jy(3, 3), jz(3, 3);
  jy << 0, -kI * r, 0, kI * r, 0, -kI * r, 0, kI * r, 0;
  jz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  const Matrix nj = ny * jy + nz * jz;
  return Matrix::Identity(3, 3) - kI * std::sin(phi) * nj +
         (std::cos(phi) - 1.0) * nj * nj;
}

}  // namespace oracle

#endif
