#ifndef PHASEFILTER_WALSH_HPP
#define PHASEFILTER_WALSH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pf {

// Bit conventions, fixed once for the whole project:
//   * Qubits are numbered 1..n and labelled 'a','b','c',...
//   * In a configuration index x, qubit i occupies bit (n-i), so qubit 1 is
//     the most significant bit: x = (x_1 x_2 ... x_n) in binary.
//   * A SubsetMask uses the same layout: qubit i is in S iff bit (n-i) is set.
inline int qubit_bit(int n, int qubit) { return (n - qubit); }

// Real-valued phase map on the n-qubit Boolean cube. Phases are stored
// unreduced; mod-2pi comparisons happen only where an operation declares them.
struct PhaseMap {
  int n = 0;
  std::vector<double> values;  // size 2^n

  PhaseMap() = default;
  PhaseMap(int n_qubits, std::vector<double> vals);
  static PhaseMap zero(int n_qubits);
  std::size_t size() const { return values.size(); }
  double operator()(std::uint32_t x) const { return values[x]; }
};

// Subset S of {1..n} encoded as a bitmask over configuration bits.
struct SubsetMask {
  int n = 0;
  std::uint32_t bits = 0;

  SubsetMask() = default;
  SubsetMask(int n_qubits, std::uint32_t mask_bits);
  static SubsetMask single(int n_qubits, int qubit);
  bool empty() const { return bits == 0; }
  int order() const;                 // |S|
  bool contains(int qubit) const;    // 1-based qubit index
  std::string label() const;         // "ab", "abc", ... ; "{}" for empty
};

// Walsh-Hadamard coefficients, indexed by SubsetMask bits.
struct WalshSpectrum {
  int n = 0;
  std::vector<double> coeffs;  // size 2^n

  double at(const SubsetMask& s) const { return coeffs[s.bits]; }
};

// chi_S(x) = prod_{i in S} (-1)^{x_i}; returns +1 or -1.
int character_value(const SubsetMask& s, std::uint32_t x);

// coeffs[S] = 2^-n sum_x phi(x) chi_S(x). Butterfly recursion; the direct
// quadratic sum lives in the test oracles.
WalshSpectrum walsh_transform(const PhaseMap& phi);

// phi(x) = sum_S coeffs[S] chi_S(x); exact inverse of walsh_transform.
PhaseMap walsh_inverse(const WalshSpectrum& spec);

// Groups coefficients by |S| = 0..n, preserving values and mask order.
struct KBodyLayer {
  int order = 0;
  std::vector<std::uint32_t> masks;
  std::vector<double> coeffs;
};
std::vector<KBodyLayer> k_body_layers(const WalshSpectrum& spec);

}  // namespace pf

#endif
