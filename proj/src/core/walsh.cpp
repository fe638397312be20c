#include "walsh.hpp"

#include <bit>
#include <cmath>

#include "errors.hpp"

namespace pf {

namespace {

constexpr int kMaxQubits = 20;

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits)
    throw_invalid("qubit count must be in [1, 20], got " + std::to_string(n));
}

}  // namespace

PhaseMap::PhaseMap(int n_qubits, std::vector<double> vals)
    : n(n_qubits), values(std::move(vals)) {
  check_qubit_count(n);
  if (values.size() != (std::size_t{1} << n))
    throw_invalid("phase map must have 2^n entries");
  for (double v : values)
    if (!std::isfinite(v)) throw_invalid("phase map entries must be finite");
}

PhaseMap PhaseMap::zero(int n_qubits) {
  check_qubit_count(n_qubits);
  PhaseMap phi;
  phi.n = n_qubits;
  phi.values.assign(std::size_t{1} << n_qubits, 0.0);
  return phi;
}

SubsetMask::SubsetMask(int n_qubits, std::uint32_t mask_bits)
    : n(n_qubits), bits(mask_bits) {
  check_qubit_count(n);
  if (bits >= (std::uint32_t{1} << n))
    throw_invalid("subset mask out of range for n = " + std::to_string(n));
}

SubsetMask SubsetMask::single(int n_qubits, int qubit) {
  if (qubit < 1 || qubit > n_qubits)
    throw_invalid("qubit index out of range");
  return SubsetMask(n_qubits, std::uint32_t{1} << qubit_bit(n_qubits, qubit));
}

int SubsetMask::order() const { return std::popcount(bits); }

bool SubsetMask::contains(int qubit) const {
  return qubit >= 1 && qubit <= n && ((bits >> qubit_bit(n, qubit)) & 1u);
}

std::string SubsetMask::label() const {
  if (bits == 0) return "{}";
  std::string out;
  for (int i = 1; i <= n; ++i)
    if (contains(i)) out.push_back(static_cast<char>('a' + i - 1));
  return out;
}

int character_value(const SubsetMask& s, std::uint32_t x) {
  if (x >= (std::uint32_t{1} << s.n))
    throw_invalid("configuration index out of range");
  return (std::popcount(s.bits & x) & 1) ? -1 : 1;
}

WalshSpectrum walsh_transform(const PhaseMap& phi) {
  check_qubit_count(phi.n);
  WalshSpectrum spec;
  spec.n = phi.n;
  spec.coeffs = phi.values;
  const std::size_t size = spec.coeffs.size();
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t base = 0; base < size; base += 2 * half) {
      for (std::size_t j = base; j < base + half; ++j) {
        const double lo = spec.coeffs[j];
        const double hi = spec.coeffs[j + half];
        spec.coeffs[j] = lo + hi;
        spec.coeffs[j + half] = lo - hi;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(size);
  for (double& c : spec.coeffs) c *= scale;
  return spec;
}

PhaseMap walsh_inverse(const WalshSpectrum& spec) {
  check_qubit_count(spec.n);
  if (spec.coeffs.size() != (std::size_t{1} << spec.n))
    throw_invalid("spectrum must have 2^n entries");
  // The butterfly is an involution up to the 2^-n factor.
  PhaseMap phi;
  phi.n = spec.n;
  phi.values = spec.coeffs;
  const std::size_t size = phi.values.size();
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t base = 0; base < size; base += 2 * half) {
      for (std::size_t j = base; j < base + half; ++j) {
        const double lo = phi.values[j];
        const double hi = phi.values[j + half];
        phi.values[j] = lo + hi;
        phi.values[j + half] = lo - hi;
      }
    }
  }
  return phi;
}

std::vector<KBodyLayer> k_body_layers(const WalshSpectrum& spec) {
  check_qubit_count(spec.n);
  std::vector<KBodyLayer> layers(spec.n + 1);
  for (int k = 0; k <= spec.n; ++k) layers[k].order = k;
  for (std::uint32_t mask = 0; mask < spec.coeffs.size(); ++mask) {
    KBodyLayer& layer = layers[std::popcount(mask)];
    layer.masks.push_back(mask);
    layer.coeffs.push_back(spec.coeffs[mask]);
  }
  return layers;
}

}  // namespace pf
