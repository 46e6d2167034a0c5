#include <doctest.h>

#include "specdemod/lineshape.hpp"
#include "specdemod/rng.hpp"

using namespace specdemod;

TEST_CASE("lorentzian rate hits the named points") {
  ResonanceParams p;
  p.f0 = 2.87e9;
  p.gamma = 5e6;
  p.epsilon = 0.15;
  p.r0 = 5e5;

  CHECK(lorentzian_rate(p.f0, p) == doctest::Approx(p.r0 * (1.0 - p.epsilon)).epsilon(1e-12));
  CHECK(lorentzian_rate(p.f0 + p.gamma, p) ==
        doctest::Approx(p.r0 * (1.0 - 0.5 * p.epsilon)).epsilon(1e-12));
  CHECK(lorentzian_rate(p.f0 - p.gamma, p) ==
        doctest::Approx(p.r0 * (1.0 - 0.5 * p.epsilon)).epsilon(1e-12));
  // monotone approach to R0 far off resonance
  const double near = lorentzian_rate(p.f0 + 100 * p.gamma, p);
  const double far = lorentzian_rate(p.f0 + 1000 * p.gamma, p);
  CHECK(near < far);
  CHECK(far < p.r0);
  CHECK(far == doctest::Approx(p.r0).epsilon(1e-5));
}

TEST_CASE("lorentzian symmetry and gain scaling") {
  ResonanceParams p;
  p.gamma = 3e6;
  p.epsilon = 0.2;
  p.r0 = 7e5;
  CounterRng rng = CounterRng::keyed(42, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = (rng.next_double() - 0.5) * 40.0 * p.gamma;
    CHECK(lorentzian_rate(p.f0 + x, p) == doctest::Approx(lorentzian_rate(p.f0 - x, p)).epsilon(1e-12));
    ResonanceParams q = p;
    const double c = 0.1 + 5.0 * rng.next_double();
    q.r0 = c * p.r0;
    CHECK(lorentzian_rate(p.f0 + x, q) == doctest::Approx(c * lorentzian_rate(p.f0 + x, p)).epsilon(1e-12));
  }
}

TEST_CASE("field/frequency conversion") {
  const double d = 2.87e9;
  CHECK(field_to_frequency(0.0, d) == d);
  CHECK(field_to_frequency(1e-3, d) - d == doctest::Approx(28e6).epsilon(1e-12));
  // 15 MHz half-window corresponds to about 0.536 mT
  CHECK(frequency_to_field(d + 15e6, d) == doctest::Approx(0.5357e-3).epsilon(1e-3));

  CounterRng rng = CounterRng::keyed(7, 0);
  for (int i = 0; i < 100; ++i) {
    const double b = (rng.next_double() - 0.5) * 0.2;
    CHECK(frequency_to_field(field_to_frequency(b, d), d) == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  ResonanceParams p;
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.gamma = 1e6;
  p.epsilon = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.epsilon = 0.1;
  p.r0 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
