#include "lsflow/problem.hpp"

#include <algorithm>
#include <cmath>

#include "lsflow/stepsize.hpp"

namespace lsflow {

LinearEquationProblem::LinearEquationProblem(Matrix h, Vector z) : h_(std::move(h)), z_(std::move(z)) {
  if (h_.rows() == 0 || h_.cols() == 0) throw DimensionError("problem: H is empty");
  if (z_.size() != h_.rows()) throw DimensionError("problem: z length must equal the row count of H");
  if (h_.rows() < h_.cols()) throw DimensionError("problem: need N >= m");
  if (!h_.all_finite() || !std::all_of(z_.begin(), z_.end(), [](double v) { return std::isfinite(v); })) {
    throw std::invalid_argument("problem: non-finite entry in H or z");
  }
}

void LinearEquationProblem::check_dim(std::span<const double> y) const {
  if (y.size() != dim()) throw DimensionError("problem: y has the wrong length");
}

void LinearEquationProblem::check_node(std::size_t i) const {
  if (i >= nodes()) throw std::out_of_range("problem: node index out of range");
}

double LinearEquationProblem::local_cost(std::size_t i, std::span<const double> y) const {
  check_node(i);
  check_dim(y);
  const double r = dot(row(i), y) - z_[i];
  return r * r;
}

double LinearEquationProblem::cost(std::span<const double> y) const {
  check_dim(y);
  const Vector r = sub(h_.apply(y), z_);
  return dot(r, r);
}

Vector LinearEquationProblem::local_gradient(std::size_t i, std::span<const double> y) const {
  check_node(i);
  check_dim(y);
  const auto h = row(i);
  const double r = dot(h, y) - z_[i];
  Vector g(dim());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * r * h[k];
  return g;
}

Vector LinearEquationProblem::global_gradient(std::span<const double> y) const {
  check_dim(y);
  Vector g(dim(), 0.0);
  for (std::size_t i = 0; i < nodes(); ++i) {
    const Vector gi = local_gradient(i, y);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
  }
  return g;
}

LinearEquationProblem LinearEquationProblem::scaled(double factor) const {
  Matrix h = h_;
  h *= factor;
  return {std::move(h), z_};
}

Matrix LinearEquationProblem::stacked_gram() const {
  const std::size_t m = dim();
  Matrix g(nodes() * m, nodes() * m);
  for (std::size_t i = 0; i < nodes(); ++i) {
    const auto h = row(i);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) g(i * m + a, i * m + b) = h[a] * h[b];
  }
  return g;
}

Vector LinearEquationProblem::stacked_rhs() const {
  const std::size_t m = dim();
  Vector out(nodes() * m);
  for (std::size_t i = 0; i < nodes(); ++i) {
    const auto h = row(i);
    for (std::size_t a = 0; a < m; ++a) out[i * m + a] = z_[i] * h[a];
  }
  return out;
}

double LeastSquaresSet::distance(std::span<const double> y) const {
  Vector d = sub(y, y_min_norm);
  for (const Vector& v : nullspace_basis) d = axpy(-dot(d, v), v, d);
  return norm(d);
}

LeastSquaresSet least_squares_set(const LinearEquationProblem& p, double rank_tol) {
  LeastSquaresSolution sol = min_norm_least_squares(p.H(), p.z(), rank_tol);
  LeastSquaresSet out;
  out.unique = sol.nullspace_basis.empty();
  out.y_min_norm = std::move(sol.y_min_norm);
  out.nullspace_basis = std::move(sol.nullspace_basis);
  out.min_residual = sol.min_residual;
  return out;
}

double smallest_gram_eigenvalue(const LinearEquationProblem& p) {
  return sym_eigen(p.H().gram()).values.front();
}

double strong_convexity_constant(const LinearEquationProblem& p, double rank_tol) {
  if (!least_squares_set(p, rank_tol).unique) throw NotStronglyConvexError();
  return 2.0 * smallest_gram_eigenvalue(p);
}

RatePrediction predict_rate(const LinearEquationProblem& p, const StepSizeSchedule& schedule) {
  if (schedule.kind() != StepSizeSchedule::Kind::Power) {
    throw OutOfRateScopeError("rate prediction needs a power schedule");
  }
  const double lambda = schedule.lambda();
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw OutOfRateScopeError("rate prediction: lambda must lie in (0, 1]");
  }
  if (!least_squares_set(p).unique) {
    throw OutOfRateScopeError("rate prediction needs rank(H) = m");
  }
  RatePrediction out;
  out.sigma_ratio = smallest_gram_eigenvalue(p) / static_cast<double>(p.nodes());
  if (lambda < 1.0) {
    out.regime = RateRegime::PowerLambda;
    out.exponent = lambda;
  } else if (std::abs(out.sigma_ratio - 1.0) <= kRatioEqualityTol) {
    out.regime = RateRegime::LogCorrected;
    out.exponent = 1.0;
  } else {
    out.regime = RateRegime::PowerMin;
    out.exponent = std::min(1.0, out.sigma_ratio);
  }
  return out;
}

std::string to_string(RateRegime regime) {
  switch (regime) {
    case RateRegime::PowerMin: return "PowerMin";
    case RateRegime::LogCorrected: return "LogCorrected";
    case RateRegime::PowerLambda: return "PowerLambda";
  }
  return "unknown";
}

}  // namespace lsflow
