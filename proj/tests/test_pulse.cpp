#include <doctest.h>

#include <vector>

#include "q3p/error.hpp"
#include "q3p/pulse.hpp"
#include "q3p/units.hpp"

using namespace q3p;

TEST_CASE("waveform evaluation") {
  const Waveform w({{0.0, 0.0}, {1.0, 10.0}});
  CHECK(w(0.5) == doctest::Approx(5.0));
  CHECK(w(1.0) == 10.0);
  CHECK(w(0.0) == 0.0);
  const Waveform tri({{0.0, 0.0}, {0.3, 2.5}, {1.1, -1.0}, {2.0, 4.0}});
  for (const auto& k : tri.knots()) CHECK(tri(k.time) == k.value);
  const auto c = Waveform::constant(3.5, 2.0);
  for (double t : {0.0, 0.7, 1.3, 2.0}) CHECK(c(t) == 3.5);
  CHECK_THROWS_AS((void)w(-0.1), InvalidArgument);
  CHECK_THROWS_AS((void)w(1.01), InvalidArgument);
}

TEST_CASE("waveform evaluation is continuous at knots") {
  const Waveform w({{0.0, 1.0}, {0.5, 3.0}, {1.0, -2.0}, {1.5, 0.0}});
  for (const auto& k : w.knots()) {
    if (k.time > 0.0) CHECK(w(k.time - 1e-9) == doctest::Approx(k.value).epsilon(1e-6));
    if (k.time < w.duration()) CHECK(w(k.time + 1e-9) == doctest::Approx(k.value).epsilon(1e-6));
  }
}

TEST_CASE("waveform validation") {
  CHECK_THROWS_AS(Waveform({{0.0, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(Waveform({{0.1, 1.0}, {1.0, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(Waveform({{0.0, 1.0}, {1.0, 1.0}, {1.0, 2.0}}), InvalidArgument);
}

TEST_CASE("pulse program validation") {
  const auto omega = Waveform({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}});
  CHECK_NOTHROW(PulseProgram::global(omega, Waveform::ramp(-1, 1, 1.0)).validate(3));
  const auto local = PulseProgram::local(omega, {Waveform::ramp(-1, 1, 1.0), Waveform::ramp(-1, 2, 1.0)});
  CHECK_NOTHROW(local.validate(2));
  CHECK_THROWS_AS(local.validate(3), InvalidArgument);
  CHECK(local.delta_at(1, 1.0) == 2.0);
  CHECK_THROWS_AS(PulseProgram::global(omega, Waveform::ramp(-1, 1, 2.0)).validate(1), InvalidArgument);
  const auto negative = Waveform({{0.0, 0.0}, {0.5, -1.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(PulseProgram::global(negative, Waveform::constant(0, 1.0)).validate(1), InvalidArgument);
}

TEST_CASE("parametrized pulse") {
  const PulseBounds b;
  SUBCASE("m = 3 at the Omega bound is a trapezoid") {
    const std::vector<double> om(3, b.omega_max), de{0.0, 0.0, 0.0};
    const auto p = parametrized_pulse(om, de, 4.0, b);
    const auto& k = p.omega.knots();
    REQUIRE(k.size() == 5);
    CHECK(k.front().value == 0.0);
    CHECK(k.back().value == 0.0);
    for (std::size_t i = 1; i < 4; ++i) CHECK(k[i].value == b.omega_max);
    CHECK(p.mode == PulseMode::kGlobal);
  }
  SUBCASE("m = 2 detuning is a linear ramp") {
    const double d = 3.0;
    const std::vector<double> om{1.0, 1.0}, de{-d, d};
    const auto p = parametrized_pulse(om, de, 2.0, b);
    for (double t : {0.0, 0.5, 1.0, 1.7, 2.0}) CHECK(p.delta_at(0, t) == doctest::Approx(-d + d * t));
  }
  SUBCASE("sampling at knot times returns the parameters") {
    const std::vector<double> om{1.0, 4.0, 2.0, 12.0, 0.0}, de{-20.0, 3.0, 0.0, 7.5, 25.0};
    const auto p = parametrized_pulse(om, de, 4.0, b);
    const auto ot = omega_param_times(5, 4.0);
    const auto dt = delta_param_times(5, 4.0);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(p.omega_at(ot[k]) == doctest::Approx(om[k]));
      CHECK(p.delta_at(0, dt[k]) == doctest::Approx(de[k]));
    }
    CHECK(p.omega_at(0.0) == 0.0);
    CHECK(p.omega_at(4.0) == 0.0);
    CHECK(p.duration() == 4.0);
  }
  SUBCASE("bounds are enforced") {
    const std::vector<double> ok{1.0, 1.0}, over{b.omega_max * 1.01, 1.0}, neg{-0.1, 1.0};
    const std::vector<double> dover{0.0, b.delta_max * 1.01};
    CHECK_THROWS_AS(parametrized_pulse(over, ok, 4.0, b), InvalidArgument);
    CHECK_THROWS_AS(parametrized_pulse(neg, ok, 4.0, b), InvalidArgument);
    CHECK_THROWS_AS(parametrized_pulse(ok, dover, 4.0, b), InvalidArgument);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(parametrized_pulse(one, one, 4.0, b), InvalidArgument);
  }
}
