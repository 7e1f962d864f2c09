#ifndef LSFLOW_METRICS_HPP
#define LSFLOW_METRICS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsflow/flow.hpp"
#include "lsflow/problem.hpp"

namespace lsflow {

class InsufficientWindowError : public std::invalid_argument {
 public:
  InsufficientWindowError() : std::invalid_argument("insufficient window") {}
};

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;

  std::size_t size() const { return times.size(); }
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10 value at t = 1
  double t_lo = 0.0;
  double t_hi = 0.0;
  double rms_residual = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinFitSamples = 10;

Vector mean_state(std::span<const double> x, std::size_t nodes, std::size_t dim);
// ||x - 1_N (x) mean(x)||
double consensus_error(std::span<const double> x, std::size_t nodes, std::size_t dim);
// max_{i,j} ||x_i - x_j||
double disagreement_diameter(std::span<const double> x, std::size_t nodes, std::size_t dim);

// Distance of the node average to the least-squares set at every sample.
ErrorSeries solution_error(const Trajectory& traj, const LeastSquaresSet& ls);
ErrorSeries consensus_series(const Trajectory& traj);
ErrorSeries diameter_series(const Trajectory& traj);

// value / log(t + 1); samples whose log(t + 1) is not positive are dropped.
ErrorSeries log_corrected(const ErrorSeries& series);

// Least-squares line through (log10 t, log10 value) over t in [t_lo, t_hi],
// positive values only. Throws InsufficientWindowError below kMinFitSamples.
SlopeFit fit_loglog_slope(const ErrorSeries& series, double t_lo, double t_hi);

// Limit of the flow for undirected weights: the least-squares point whose
// null(H^T H) component equals that of the initial node average.
Vector limit_oracle(const LinearEquationProblem& p, std::span<const double> x0, const LeastSquaresSet& ls);

// max_k ||x(t_k)|| over the recorded samples.
double boundedness_monitor(const Trajectory& traj);

}  // namespace lsflow

#endif  // LSFLOW_METRICS_HPP
