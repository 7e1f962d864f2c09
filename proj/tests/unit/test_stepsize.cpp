#include <doctest.h>

#include "../support/oracles.hpp"
#include "lsflow/network.hpp"
#include "lsflow/stepsize.hpp"

using namespace lsflow;

TEST_SUITE("stepsize") {
  TEST_CASE("evaluate examples") {
    CHECK(StepSizeSchedule::power(1, 1, 1).evaluate(0.0) == doctest::Approx(1.0));
    CHECK(StepSizeSchedule::power(1, 1, 0.5).evaluate(3.0) == doctest::Approx(0.5));
    for (double t : {0.0, 1.0, 1e6}) CHECK(StepSizeSchedule::constant(0.2).evaluate(t) == 0.2);
    CHECK_THROWS(StepSizeSchedule::power(0, 1, 1));
    CHECK_THROWS(StepSizeSchedule::power(1, 0, 1));
    CHECK_THROWS(StepSizeSchedule::power(1, 1, -0.5));
    CHECK_THROWS(StepSizeSchedule::constant(-1));
    CHECK_THROWS(StepSizeSchedule::power(1, 1, 1).evaluate(-1.0));
  }

  TEST_CASE("power schedules are positive and nonincreasing") {
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5}) {
      const StepSizeSchedule s = StepSizeSchedule::power(2.0, 1.0, lambda);
      double prev = s.evaluate(0.0);
      for (double t = 0.01; t < 1e6; t *= 1.3) {
        const double v = s.evaluate(t);
        CHECK(v > 0.0);
        CHECK(v <= prev);
        prev = v;
      }
    }
  }

  TEST_CASE("assumption_profile truth table") {
    for (double lambda : {0.25, 0.5, 0.75, 1.0, 1.5}) {
      CAPTURE(lambda);
      const AssumptionProfile a = StepSizeSchedule::power(1, 1, lambda).assumption_profile();
      CHECK(a.nonintegrable == (lambda <= 1.0));
      CHECK(a.vanishing == (lambda > 0.0));
      CHECK(a.square_integrable == (lambda > 0.5));
    }
    CHECK(StepSizeSchedule::power(1, 1, 1).assumption_profile() == AssumptionProfile{true, true, true});
    CHECK(StepSizeSchedule::power(1, 1, 0.25).assumption_profile() == AssumptionProfile{true, true, false});
    CHECK(StepSizeSchedule::constant(3).assumption_profile() == AssumptionProfile{true, false, false});
    CHECK(StepSizeSchedule::power(1, 1, 0).assumption_profile() == AssumptionProfile{true, false, false});
  }

  TEST_CASE("admissible_for examples") {
    const auto one = StepSizeSchedule::power(1, 1, 1);
    const auto quarter = StepSizeSchedule::power(1, 1, 0.25);
    CHECK(one.admissible_for(ScenarioKind::FixedConnected));
    CHECK(one.admissible_for(ScenarioKind::SwitchingAllConnected));
    CHECK(one.admissible_for(ScenarioKind::UniformlyJointlyConnected));
    CHECK_FALSE(quarter.admissible_for(ScenarioKind::SwitchingAllConnected));
    CHECK_FALSE(quarter.admissible_for(ScenarioKind::UniformlyJointlyConnected));
    CHECK(quarter.admissible_for(ScenarioKind::FixedConnected));
    CHECK_FALSE(StepSizeSchedule::constant(0.2).admissible_for(ScenarioKind::FixedConnected));
    CHECK_FALSE(StepSizeSchedule::power(1, 1, 1.5).admissible_for(ScenarioKind::FixedConnected));
    CHECK_FALSE(one.admissible_for(ScenarioKind::Unsupported));
  }

  TEST_CASE("quadrature agrees with the analytic profile") {
    // integrate in u = log(1 + t) so the long tail is resolved evenly
    auto integral = [](const StepSizeSchedule& s, double power, double horizon) {
      return oracle::simpson([&](double u) { return std::pow(s.evaluate(std::expm1(u)), power) * std::exp(u); },
                             0.0, std::log1p(horizon), 20000);
    };
    const auto one = StepSizeSchedule::power(1, 1, 1);
    CHECK(integral(one, 1.0, 1e6) > 10.0);  // log(1e6 + 1) ~ 13.8, still growing
    CHECK(integral(one, 1.0, 1e6) > integral(one, 1.0, 1e5) + 2.0);

    const auto three_quarters = StepSizeSchedule::power(1, 1, 0.75);
    const double a = integral(three_quarters, 2.0, 1e5);
    const double b = integral(three_quarters, 2.0, 1e6);
    const double limit = 2.0;  // int_0^inf (1+t)^-1.5 dt
    CHECK(std::abs(b - limit) / limit < 0.01);
    CHECK(b > a);
    CHECK((b - a) / b < 0.01);

    const auto quarter = StepSizeSchedule::power(1, 1, 0.25);
    CHECK(integral(quarter, 2.0, 1e6) > 1.5 * integral(quarter, 2.0, 1e5));
  }
}
