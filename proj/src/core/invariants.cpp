#include "invariants.hpp"

#include <bit>

#include "errors.hpp"

namespace pf {

namespace {

void check_nonempty(const SubsetMask& s) {
  if (s.empty())
    throw_invalid("phase invariants are defined for nonempty subsets only");
}

void check_same_n(int a, int b) {
  if (a != b) throw_invalid("qubit-count mismatch");
}

}  // namespace

double InvariantSet::at(const SubsetMask& s) const {
  check_same_n(s.n, n);
  check_nonempty(s);
  return values[s.bits];
}

PhaseMap discrete_derivative(const PhaseMap& phi, int qubit) {
  if (qubit < 1 || qubit > phi.n) throw_invalid("qubit index out of range");
  const std::uint32_t flip = std::uint32_t{1} << qubit_bit(phi.n, qubit);
  PhaseMap out = PhaseMap::zero(phi.n);
  for (std::uint32_t x = 0; x < phi.values.size(); ++x) {
    const std::uint32_t hi = x | flip;
    const std::uint32_t lo = x & ~flip;
    out.values[x] = 0.5 * (phi.values[hi] - phi.values[lo]);
  }
  return out;
}

PhaseMap multi_derivative(const PhaseMap& phi, const SubsetMask& s) {
  check_same_n(s.n, phi.n);
  check_nonempty(s);
  PhaseMap out = phi;
  for (int i = 1; i <= phi.n; ++i)
    if (s.contains(i)) out = discrete_derivative(out, i);
  return out;
}

double invariant(const PhaseMap& phi, const SubsetMask& s) {
  check_same_n(s.n, phi.n);
  check_nonempty(s);
  double acc = 0.0;
  for (std::uint32_t x = 0; x < phi.values.size(); ++x)
    acc += character_value(s, x) * phi.values[x];
  const double sign = (s.order() & 1) ? -1.0 : 1.0;
  return sign * acc / static_cast<double>(phi.values.size());
}

double invariant_definition_route(const PhaseMap& phi, const SubsetMask& s) {
  check_same_n(s.n, phi.n);
  check_nonempty(s);
  const PhaseMap deriv = multi_derivative(phi, s);
  // deriv is constant along every coordinate in S, so summing over all x and
  // dividing by 2^n averages exactly over the complement configurations.
  double acc = 0.0;
  for (double v : deriv.values) acc += v;
  return acc / static_cast<double>(deriv.values.size());
}

InvariantSet all_invariants(const PhaseMap& phi) {
  const WalshSpectrum spec = walsh_transform(phi);
  InvariantSet inv;
  inv.n = phi.n;
  inv.values.assign(spec.coeffs.size(), 0.0);
  for (std::uint32_t mask = 1; mask < spec.coeffs.size(); ++mask) {
    const double sign = (std::popcount(mask) & 1) ? -1.0 : 1.0;
    inv.values[mask] = sign * spec.coeffs[mask];
  }
  return inv;
}

double invariant_appendix_b(const PhaseMap& phi, const SubsetMask& s) {
  if (phi.n != 3)
    throw_invalid("the explicit closed forms are defined for n = 3 only");
  check_same_n(s.n, phi.n);
  check_nonempty(s);
  // Literal sign tables of the seven closed-form expressions, one row per
  // subset mask, columns ordered phi_000 .. phi_111.
  static constexpr int kSign[8][8] = {
      {0, 0, 0, 0, 0, 0, 0, 0},          // (empty, unused)
      {+1, -1, +1, -1, +1, -1, +1, -1},  // {c}
      {+1, +1, -1, -1, +1, +1, -1, -1},  // {b}
      {+1, -1, -1, +1, +1, -1, -1, +1},  // {b,c}
      {+1, +1, +1, +1, -1, -1, -1, -1},  // {a}
      {+1, -1, +1, -1, -1, +1, -1, +1},  // {a,c}
      {+1, +1, -1, -1, -1, -1, +1, +1},  // {a,b}
      {+1, -1, -1, +1, -1, +1, +1, -1},  // {a,b,c}
  };
  double acc = 0.0;
  for (std::uint32_t x = 0; x < 8; ++x)
    acc += kSign[s.bits][x] * phi.values[x];
  return acc / 8.0;
}

}  // namespace pf
