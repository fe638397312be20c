#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "oracles.hpp"
#include "walsh.hpp"

using namespace pf;
constexpr double kPi = std::numbers::pi;

TEST_CASE("character values") {
  const SubsetMask empty(2, 0);
  CHECK(character_value(empty, 0) == 1);
  CHECK(character_value(empty, 3) == 1);

  // S = {1,2} on n = 2: x = 01 flips one factor.
  const SubsetMask s12(2, 0b11);
  CHECK(character_value(s12, 0b01) == -1);
  CHECK(character_value(s12, 0b00) == 1);
  CHECK(character_value(s12, 0b11) == 1);

  const SubsetMask s123(3, 0b111);
  CHECK(character_value(s123, 0b111) == -1);

  CHECK_THROWS_AS(character_value(SubsetMask(2, 1), 7), Error);
}

TEST_CASE("character group law chi_S(x) chi_S(y) = chi_S(x xor y)") {
  for (int n = 1; n <= 4; ++n) {
    const std::uint32_t dim = 1u << n;
    for (std::uint32_t s = 0; s < dim; ++s) {
      const SubsetMask mask(n, s);
      for (std::uint32_t x = 0; x < dim; ++x)
        for (std::uint32_t y = 0; y < dim; ++y)
          CHECK(character_value(mask, x) * character_value(mask, y) ==
                character_value(mask, x ^ y));
    }
  }
}

TEST_CASE("transform of the two-qubit interaction map") {
  const double gamma = 0.7;
  const PhaseMap phi(2, {gamma, -gamma, -gamma, gamma});
  const WalshSpectrum spec = walsh_transform(phi);
  CHECK(spec.coeffs[0b11] == doctest::Approx(gamma).epsilon(1e-14));
  CHECK(std::abs(spec.coeffs[0b00]) < 1e-14);
  CHECK(std::abs(spec.coeffs[0b01]) < 1e-14);
  CHECK(std::abs(spec.coeffs[0b10]) < 1e-14);
}

TEST_CASE("transform of a constant map") {
  PhaseMap phi = PhaseMap::zero(3);
  for (double& v : phi.values) v = 1.3;
  const WalshSpectrum spec = walsh_transform(phi);
  CHECK(spec.coeffs[0] == doctest::Approx(1.3).epsilon(1e-14));
  for (std::uint32_t s = 1; s < 8; ++s) CHECK(std::abs(spec.coeffs[s]) < 1e-14);
}

TEST_CASE("transform of a single-qubit map") {
  const PhaseMap phi(1, {0.0, kPi / 2});
  const WalshSpectrum spec = walsh_transform(phi);
  CHECK(spec.coeffs[0b0] == doctest::Approx(kPi / 4));
  CHECK(spec.coeffs[0b1] == doctest::Approx(-kPi / 4));
}

TEST_CASE("inverse reproduces pure spectra") {
  WalshSpectrum spec;
  spec.n = 3;
  spec.coeffs.assign(8, 0.0);
  spec.coeffs[0] = 1.3;
  PhaseMap constant = walsh_inverse(spec);
  for (double v : constant.values) CHECK(v == doctest::Approx(1.3));

  spec.coeffs[0] = 0.0;
  spec.coeffs[0b111] = kPi / 4;
  PhaseMap zzz = walsh_inverse(spec);
  for (std::uint32_t x = 0; x < 8; ++x) {
    const int parity = std::popcount(x) & 1 ? -1 : 1;
    CHECK(zzz.values[x] == doctest::Approx(parity * kPi / 4));
  }
}

TEST_CASE("round trip on a seeded random map") {
  const PhaseMap phi = oracle::random_map(5, 12345);
  const PhaseMap back = walsh_inverse(walsh_transform(phi));
  for (std::uint32_t x = 0; x < phi.values.size(); ++x)
    CHECK(std::abs(back.values[x] - phi.values[x]) <= 1e-12);
}

TEST_CASE("fast transform matches the direct definition sum") {
  for (int n = 1; n <= 8; ++n) {
    const PhaseMap phi = oracle::random_map(n, 777 + n);
    const WalshSpectrum fast = walsh_transform(phi);
    const std::vector<double> direct = oracle::direct_transform(phi);
    for (std::uint32_t s = 0; s < direct.size(); ++s)
      CHECK(std::abs(fast.coeffs[s] - direct[s]) <= 1e-12);
  }
}

TEST_CASE("Parseval consistency") {
  for (int n = 1; n <= 8; ++n) {
    const PhaseMap phi = oracle::random_map(n, 99 + n);
    const WalshSpectrum spec = walsh_transform(phi);
    double lhs = 0.0, rhs = 0.0;
    for (double v : phi.values) lhs += v * v;
    for (double c : spec.coeffs) rhs += c * c;
    rhs *= static_cast<double>(phi.values.size());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("transform linearity") {
  const PhaseMap f = oracle::random_map(4, 1);
  const PhaseMap g = oracle::random_map(4, 2);
  const double a = 1.7, b = -0.4;
  PhaseMap mix = PhaseMap::zero(4);
  for (std::uint32_t x = 0; x < 16; ++x)
    mix.values[x] = a * f.values[x] + b * g.values[x];
  const WalshSpectrum sm = walsh_transform(mix);
  const WalshSpectrum sf = walsh_transform(f);
  const WalshSpectrum sg = walsh_transform(g);
  for (std::uint32_t s = 0; s < 16; ++s)
    CHECK(std::abs(sm.coeffs[s] - (a * sf.coeffs[s] + b * sg.coeffs[s])) <=
          1e-12);
}

TEST_CASE("k-body layers regroup the spectrum") {
  WalshSpectrum spec;
  spec.n = 2;
  spec.coeffs = {0.1, 0.2, 0.3, 0.4};
  const auto layers = k_body_layers(spec);
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].coeffs == std::vector<double>{0.1});
  CHECK(layers[1].coeffs == std::vector<double>{0.2, 0.3});
  CHECK(layers[2].coeffs == std::vector<double>{0.4});

  // Concatenation in mask order reproduces the spectrum.
  std::vector<double> seen(4, 0.0);
  for (const auto& layer : layers)
    for (std::size_t i = 0; i < layer.masks.size(); ++i)
      seen[layer.masks[i]] = layer.coeffs[i];
  CHECK(seen == spec.coeffs);

  WalshSpectrum zero;
  zero.n = 3;
  zero.coeffs.assign(8, 0.0);
  for (const auto& layer : k_body_layers(zero))
    for (double c : layer.coeffs) CHECK(c == 0.0);

  WalshSpectrum one;
  one.n = 3;
  one.coeffs.assign(8, 0.0);
  one.coeffs[0b101] = 0.5;  // {a, c}
  int nonzero = 0;
  const auto layers3 = k_body_layers(one);
  for (std::size_t i = 0; i < layers3[2].coeffs.size(); ++i)
    if (layers3[2].coeffs[i] != 0.0) {
      ++nonzero;
      CHECK(layers3[2].coeffs[i] == 0.5);
      CHECK(layers3[2].masks[i] == 0b101);
    }
  CHECK(nonzero == 1);
}

TEST_CASE("subset labels follow qubit letters") {
  CHECK(SubsetMask(3, 0b101).label() == "ac");
  CHECK(SubsetMask(3, 0b111).label() == "abc");
  CHECK(SubsetMask(3, 0b010).label() == "b");
  CHECK(SubsetMask(3, 0).label() == "{}");
  CHECK(SubsetMask::single(3, 1).bits == 0b100);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(PhaseMap(2, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(PhaseMap(0, {}), Error);
  CHECK_THROWS_AS(SubsetMask(2, 4), Error);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(PhaseMap(1, {0.0, inf}), Error);
}
