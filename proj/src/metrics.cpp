#include "lsflow/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace lsflow {

namespace {

void check_layout(std::span<const double> x, std::size_t nodes, std::size_t dim) {
  if (nodes == 0 || dim == 0 || x.size() != nodes * dim) throw DimensionError("state length must be N*m");
}

template <typename F>
ErrorSeries map_samples(const Trajectory& traj, std::string label, F&& f) {
  ErrorSeries out;
  out.label = std::move(label);
  for (const Sample& s : traj.samples) {
    out.times.push_back(s.t);
    out.values.push_back(f(s.x));
  }
  return out;
}

}  // namespace

Vector mean_state(std::span<const double> x, std::size_t nodes, std::size_t dim) {
  check_layout(x, nodes, dim);
  Vector mean(dim, 0.0);
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += x[i * dim + d];
  for (double& v : mean) v /= static_cast<double>(nodes);
  return mean;
}

double consensus_error(std::span<const double> x, std::size_t nodes, std::size_t dim) {
  check_layout(x, nodes, dim);
  // sum_i ||x_i - mean||^2 = (1/N) sum_{i<j} ||x_i - x_j||^2, exactly 0 at consensus
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = i + 1; j < nodes; ++j)
      for (std::size_t d = 0; d < dim; ++d) {
        const double dev = x[i * dim + d] - x[j * dim + d];
        acc += dev * dev;
      }
  return std::sqrt(acc / static_cast<double>(nodes));
}

double disagreement_diameter(std::span<const double> x, std::size_t nodes, std::size_t dim) {
  check_layout(x, nodes, dim);
  double best = 0.0;
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = i + 1; j < nodes; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = x[i * dim + d] - x[j * dim + d];
        acc += diff * diff;
      }
      best = std::max(best, std::sqrt(acc));
    }
  return best;
}

ErrorSeries solution_error(const Trajectory& traj, const LeastSquaresSet& ls) {
  return map_samples(traj, "solution_error", [&](const Vector& x) {
    return ls.distance(mean_state(x, traj.nodes, traj.dim));
  });
}

ErrorSeries consensus_series(const Trajectory& traj) {
  return map_samples(traj, "consensus_error",
                     [&](const Vector& x) { return consensus_error(x, traj.nodes, traj.dim); });
}

ErrorSeries diameter_series(const Trajectory& traj) {
  return map_samples(traj, "disagreement_diameter",
                     [&](const Vector& x) { return disagreement_diameter(x, traj.nodes, traj.dim); });
}

ErrorSeries log_corrected(const ErrorSeries& series) {
  ErrorSeries out;
  out.label = series.label + "_log_corrected";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double l = std::log1p(series.times[k]);
    if (!(l > 0.0)) continue;
    out.times.push_back(series.times[k]);
    out.values.push_back(series.values[k] / l);
  }
  return out;
}

SlopeFit fit_loglog_slope(const ErrorSeries& series, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw InsufficientWindowError();
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = series.times[k];
    const double v = series.values[k];
    if (t < t_lo || t > t_hi || !(t > 0.0) || !(v > 0.0) || !std::isfinite(v)) continue;
    lx.push_back(std::log10(t));
    ly.push_back(std::log10(v));
  }
  if (lx.size() < kMinFitSamples) throw InsufficientWindowError();

  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientWindowError();

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples = lx.size();
  double ss = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

Vector limit_oracle(const LinearEquationProblem& p, std::span<const double> x0, const LeastSquaresSet& ls) {
  // Weights are undirected, so the Laplacian term drops out of the average and
  // the node average only moves inside range(H^T).
  const Vector mean0 = mean_state(x0, p.nodes(), p.dim());
  Vector limit = ls.y_min_norm;
  for (const Vector& v : ls.nullspace_basis) limit = axpy(dot(mean0, v), v, limit);
  return limit;
}

double boundedness_monitor(const Trajectory& traj) {
  double best = 0.0;
  for (const Sample& s : traj.samples) best = std::max(best, norm(s.x));
  return best;
}

}  // namespace lsflow
