#ifndef LSFLOW_STEPSIZE_HPP
#define LSFLOW_STEPSIZE_HPP

#include <string>

namespace lsflow {

enum class ScenarioKind;

// Assumption 1 items: (i) integral of alpha diverges, (ii) alpha -> 0,
// (iii) integral of alpha^2 is finite.
struct AssumptionProfile {
  bool nonintegrable = false;
  bool vanishing = false;
  bool square_integrable = false;

  bool operator==(const AssumptionProfile&) const = default;
};

// alpha(t) = c / (t0 + t)^lambda, or a constant c.
class StepSizeSchedule {
 public:
  enum class Kind { Power, Constant };

  static StepSizeSchedule power(double c, double t0, double lambda);
  static StepSizeSchedule constant(double c);

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double t0() const { return t0_; }
  double lambda() const { return lambda_; }

  double evaluate(double t) const;
  AssumptionProfile assumption_profile() const;
  bool admissible_for(ScenarioKind scenario) const;

  std::string describe() const;

 private:
  StepSizeSchedule(Kind kind, double c, double t0, double lambda)
      : kind_(kind), c_(c), t0_(t0), lambda_(lambda) {}

  Kind kind_;
  double c_;
  double t0_;
  double lambda_;
};

}  // namespace lsflow

#endif  // LSFLOW_STEPSIZE_HPP
