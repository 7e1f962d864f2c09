#ifndef LSFLOW_FLOW_HPP
#define LSFLOW_FLOW_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsflow/network.hpp"
#include "lsflow/numerics.hpp"
#include "lsflow/problem.hpp"
#include "lsflow/stepsize.hpp"

namespace lsflow {

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double t, double max_abs);
  double time() const { return time_; }
  double max_abs() const { return max_abs_; }

 private:
  double time_;
  double max_abs_;
};

// x' = -M(t) x + alpha(t) z_H with M(t) = K (L(t) (x) I_m) + alpha(t) H~.
// States are node-major: x = [x_1^T, ..., x_N^T]^T.
class FlowSystem {
 public:
  FlowSystem(LinearEquationProblem problem, SwitchingSignal signal, double gain, StepSizeSchedule schedule);

  const LinearEquationProblem& problem() const { return problem_; }
  const SwitchingSignal& signal() const { return signal_; }
  double gain() const { return gain_; }
  const StepSizeSchedule& schedule() const { return schedule_; }
  std::size_t state_size() const { return problem_.nodes() * problem_.dim(); }
  const Vector& z_h() const { return z_h_; }

  Matrix build_M(double t) const;
  Matrix build_M_for(std::size_t graph, double t) const;

  Vector rhs(double t, std::span<const double> x) const;
  Vector rhs_for(std::size_t graph, double t, std::span<const double> x) const;
  // Same quantity evaluated node by node:
  // K sum_j A_ij (x_j - x_i) - alpha(t) (h_i h_i^T x_i - z_i h_i).
  Vector rhs_nodewise(double t, std::span<const double> x) const;

  // One step on [t, t+h] with the graph active at t; the interval must not
  // contain a switch instant in its interior.
  Vector step_rk4(double t, std::span<const double> x, double h) const;
  Vector step_trapezoidal(double t, std::span<const double> x, double h) const;
  Vector step_rk4_for(std::size_t graph, double t, std::span<const double> x, double h) const;
  Vector step_trapezoidal_for(std::size_t graph, double t, std::span<const double> x, double h) const;

  // Largest RK4 step inside the real-axis stability interval:
  // 2.78 / (K max lambda_max(L) + alpha(0) max_i ||h_i||^2).
  double rk4_step_limit() const;

 private:
  LinearEquationProblem problem_;
  SwitchingSignal signal_;
  double gain_;
  StepSizeSchedule schedule_;
  std::vector<Matrix> consensus_;  // K (L_g (x) I_m), one per graph
  std::vector<Matrix> adjacency_;
  Matrix h_tilde_;
  Vector z_h_;
};

enum class Method { RK4, Trapezoidal };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct IntegratorSpec {
  Method method = Method::Trapezoidal;
  double h = 1e-3;
  double h_max = 0.5;
  double growth = 1.05;
  double fixed_until = 10.0;  // step size stays at h before this time
  std::vector<double> record_times;
};

// `points` geometrically spaced times from t_min to horizon (inclusive).
std::vector<double> geometric_record_times(double t_min, double horizon, std::size_t points);

struct Sample {
  double t = 0.0;
  Vector x;
};

struct Trajectory {
  std::vector<Sample> samples;
  Method method = Method::Trapezoidal;
  double h = 0.0;
  double gain = 0.0;
  std::string schedule;
  std::size_t steps = 0;
  std::size_t nodes = 0;
  std::size_t dim = 0;

  const Sample& terminal() const { return samples.back(); }
};

// Integrates from t = 0 to `horizon`. The step grid is cut at every switch
// instant and every record time, so samples land exactly on the requested
// times. The trapezoidal step grows geometrically after spec.fixed_until;
// RK4 keeps spec.h. Throws DivergenceError on a non-finite state.
Trajectory simulate(const FlowSystem& sys, std::span<const double> x0, const IntegratorSpec& spec,
                    double horizon);

}  // namespace lsflow

#endif  // LSFLOW_FLOW_HPP
