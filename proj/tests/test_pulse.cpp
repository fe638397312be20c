#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "pulse.hpp"

using namespace pf;
constexpr double kPi = std::numbers::pi;

TEST_CASE("window endpoints and flat region") {
  const double T = 1500e-9, alpha = 0.15;
  CHECK(window(0.0, T, alpha) == doctest::Approx(0.0));
  CHECK(window(T, T, alpha) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(window(T / 2, T, alpha) == 1.0);
  CHECK(window(alpha * T / 2, T, alpha) == doctest::Approx(0.5));
  // No jump where the ramp meets the flat region.
  CHECK(std::abs(window(alpha * T, T, alpha) - 1.0) <= 1e-12);
  const double eps = 1e-13 * T;
  CHECK(std::abs(window(alpha * T - eps, T, alpha) -
                 window(alpha * T + eps, T, alpha)) <= 1e-9);
  CHECK_THROWS_AS(window(-1e-12, T, alpha), Error);
  CHECK_THROWS_AS(window(T + 1e-12, T, alpha), Error);
}

TEST_CASE("window continuity under refinement") {
  const double T = 100e-9, alpha = 0.3;
  double prev_max_jump = 0.0;
  for (double delta : {1e-10, 1e-11, 1e-12}) {
    double max_jump = 0.0;
    for (double t = 0.0; t + delta <= T; t += 1e-10)
      max_jump = std::max(max_jump,
                          std::abs(window(t + delta, T, alpha) - window(t, T, alpha)));
    if (prev_max_jump > 0.0) CHECK(max_jump < prev_max_jump);
    prev_max_jump = max_jump;
  }
  CHECK(prev_max_jump < 1e-3);
}

TEST_CASE("envelope basics") {
  PulseParams p;
  p.duration_s = 1000e-9;
  p.taper = 0.15;
  const double t_flat = 500e-9;

  CHECK(envelope(t_flat, p) == 0.0);  // no tones

  p.tones = {{1.0, 0.0, 0.0}};
  CHECK(envelope(t_flat, p) == doctest::Approx(1.0));
  p.tones = {{1.0, 0.0, kPi}};
  CHECK(envelope(t_flat, p) == doctest::Approx(-1.0));
}

TEST_CASE("envelope bound and amplitude linearity") {
  PulseParams p;
  p.duration_s = 800e-9;
  p.taper = 0.2;
  p.tones = {{0.7, 2 * kPi * 3e6, 0.3}, {-0.4, 2 * kPi * 1e6, 1.0},
             {0.2, -2 * kPi * 5e6, 2.0}};
  double bound = 0.0;
  for (const Tone& tone : p.tones) bound += std::abs(tone.amplitude_t);
  PulseParams doubled = p;
  for (Tone& tone : doubled.tones) tone.amplitude_t *= 2.0;
  for (int k = 0; k <= 200; ++k) {
    const double t = p.duration_s * k / 200.0;
    CHECK(std::abs(envelope(t, p)) <= bound + 1e-12);
    CHECK(envelope(t, doubled) == doctest::Approx(2.0 * envelope(t, p)));
  }
}

TEST_CASE("slew penalty on flat and zero envelopes") {
  CHECK(slew_penalty(std::vector<double>(100, 0.0), 1e-9) == 0.0);
  CHECK(slew_penalty(std::vector<double>(100, 3.3e-3), 1e-9) == 0.0);
  CHECK_THROWS_AS(slew_penalty(std::vector<double>{1.0}, 1e-9), Error);
  CHECK_THROWS_AS(slew_penalty(std::vector<double>{1.0, 2.0}, 0.0), Error);
}

TEST_CASE("slew penalty matches the analytic cosine mean square") {
  // Single tone, amplitude 1 T at 1 MHz, sampled at 1 ns in the flat region.
  const double omega = 2 * kPi * 1e6;
  const double dt = 1e-9;
  std::vector<double> samples;
  for (int k = 0; k < 2000; ++k) samples.push_back(std::cos(omega * k * dt));
  const double measured = slew_penalty(samples, dt);
  // Mean of (dE/dt)^2 is a^2 w^2 / 2, converted to (mT/us)^2.
  const double analytic = 0.5 * omega * omega * 1e-6;
  CHECK(measured == doctest::Approx(analytic).epsilon(0.05));
}

TEST_CASE("parameter vector layout round trip") {
  PulseParams p;
  p.duration_s = 1e-6;
  p.taper = 0.15;
  p.tones = {{0.1, 2.0, 0.3}, {-0.2, -4.0, 1.5}};
  const std::vector<double> v = p.pack();
  REQUIRE(v.size() == 6);
  CHECK(v[0] == 0.1);   // amplitudes first
  CHECK(v[1] == -0.2);
  CHECK(v[2] == 2.0);   // then frequencies
  CHECK(v[3] == -4.0);
  CHECK(v[4] == 0.3);   // then phases
  CHECK(v[5] == 1.5);
  const PulseParams q = PulseParams::unpack(v, p.duration_s, p.taper);
  CHECK(q.tones[1].freq_rad_s == -4.0);
  CHECK_THROWS_AS(PulseParams::unpack({1.0, 2.0}, 1e-6, 0.15), Error);
}

TEST_CASE("midpoint sampling covers every step") {
  PulseParams p;
  p.duration_s = 10e-9;
  p.taper = 0.0;
  p.tones = {{1.0, 0.0, 0.0}};
  const TimeGrid grid(p.duration_s, 4);
  const auto samples = envelope_midpoints(p, grid);
  REQUIRE(samples.size() == 4);
  for (double s : samples) CHECK(s == doctest::Approx(1.0));
}
