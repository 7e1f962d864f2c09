#include "lsflow/stepsize.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lsflow/network.hpp"

namespace lsflow {

StepSizeSchedule StepSizeSchedule::power(double c, double t0, double lambda) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("stepsize: c must be positive");
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("stepsize: t0 must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("stepsize: lambda must be >= 0");
  return {Kind::Power, c, t0, lambda};
}

StepSizeSchedule StepSizeSchedule::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("stepsize: c must be positive");
  return {Kind::Constant, c, 1.0, 0.0};
}

double StepSizeSchedule::evaluate(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("stepsize: t must be >= 0");
  if (kind_ == Kind::Constant || lambda_ == 0.0) return c_;
  if (lambda_ == 1.0) return c_ / (t0_ + t);
  return c_ * std::pow(t0_ + t, -lambda_);
}

AssumptionProfile StepSizeSchedule::assumption_profile() const {
  if (kind_ == Kind::Constant) return {true, false, false};
  return {lambda_ <= 1.0, lambda_ > 0.0, lambda_ > 0.5};
}

bool StepSizeSchedule::admissible_for(ScenarioKind scenario) const {
  const AssumptionProfile a = assumption_profile();
  switch (scenario) {
    case ScenarioKind::FixedConnected:
      return a.nonintegrable && a.vanishing;
    case ScenarioKind::SwitchingAllConnected:
    case ScenarioKind::UniformlyJointlyConnected:
      return a.nonintegrable && a.vanishing && a.square_integrable;
    case ScenarioKind::Unsupported:
      return false;
  }
  return false;
}

std::string StepSizeSchedule::describe() const {
  char buf[128];
  if (kind_ == Kind::Constant) {
    std::snprintf(buf, sizeof buf, "constant(c=%g)", c_);
  } else {
    std::snprintf(buf, sizeof buf, "power(c=%g, t0=%g, lambda=%g)", c_, t0_, lambda_);
  }
  return buf;
}

}  // namespace lsflow
