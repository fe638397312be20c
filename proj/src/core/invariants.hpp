#ifndef PHASEFILTER_INVARIANTS_HPP
#define PHASEFILTER_INVARIANTS_HPP

#include <vector>

#include "walsh.hpp"

namespace pf {

// Values Delta_S for every nonempty subset S, indexed by mask bits.
// Slot 0 (the empty set) is kept as padding and never holds an invariant.
struct InvariantSet {
  int n = 0;
  std::vector<double> values;  // size 2^n, index = SubsetMask::bits

  double at(const SubsetMask& s) const;
  std::size_t count() const { return values.empty() ? 0 : values.size() - 1; }
};

// (delta_i phi)(x) = [phi(x with x_i = 1) - phi(x with x_i = 0)] / 2.
// The result is constant along coordinate i (both slices equal).
PhaseMap discrete_derivative(const PhaseMap& phi, int qubit);

// Successive application of delta_i over i in S; order-independent.
PhaseMap multi_derivative(const PhaseMap& phi, const SubsetMask& s);

// Production route: the alternating-sum identity
//   Delta_S = (-1)^|S| 2^-n sum_x (-1)^{sum_{i in S} x_i} phi(x).
double invariant(const PhaseMap& phi, const SubsetMask& s);

// Defining route: the complement average of the multi-derivative,
//   Delta_S = 2^-|S_bar| sum_{x_bar} (delta_S phi)(x_S, x_bar).
// Equal to invariant() to rounding; kept as the independent second path.
double invariant_definition_route(const PhaseMap& phi, const SubsetMask& s);

// All 2^n - 1 invariants at once through a single Walsh transform,
// using Delta_S = (-1)^|S| phi_hat(S).
InvariantSet all_invariants(const PhaseMap& phi);

// The explicit three-qubit closed forms, evaluated verbatim as the unsigned
// eight-term sums (1/8) sum_x (-1)^{sum_{i in S} x_i} phi(x). They relate to
// the production route by invariant = (-1)^|S| * invariant_appendix_b; the
// two agree for even |S| and differ by sign for odd |S|.
double invariant_appendix_b(const PhaseMap& phi, const SubsetMask& s);

}  // namespace pf

#endif
