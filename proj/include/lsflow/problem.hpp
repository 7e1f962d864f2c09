#ifndef LSFLOW_PROBLEM_HPP
#define LSFLOW_PROBLEM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lsflow/numerics.hpp"

namespace lsflow {

class StepSizeSchedule;

class NotStronglyConvexError : public std::domain_error {
 public:
  NotStronglyConvexError() : std::domain_error("not strongly convex: H is rank deficient") {}
};

class OutOfRateScopeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The network linear equation z = H y. Row i (h_i, z_i) belongs to node i.
class LinearEquationProblem {
 public:
  LinearEquationProblem(Matrix h, Vector z);

  const Matrix& H() const { return h_; }
  const Vector& z() const { return z_; }
  std::size_t nodes() const { return h_.rows(); }
  std::size_t dim() const { return h_.cols(); }
  std::span<const double> row(std::size_t i) const { return h_.row(i); }

  // f(y) = ||z - H y||^2 = sum_i (h_i^T y - z_i)^2.
  double cost(std::span<const double> y) const;
  double local_cost(std::size_t i, std::span<const double> y) const;
  // grad f_i(y) = 2 (h_i h_i^T y - z_i h_i)
  Vector local_gradient(std::size_t i, std::span<const double> y) const;
  Vector global_gradient(std::span<const double> y) const;

  // Same problem with H scaled by `factor`, z unchanged.
  LinearEquationProblem scaled(double factor) const;

  // Block-diagonal diag(h_1 h_1^T, ..., h_N h_N^T), size N*m.
  Matrix stacked_gram() const;
  // [z_1 h_1^T ... z_N h_N^T]^T, length N*m.
  Vector stacked_rhs() const;

 private:
  void check_dim(std::span<const double> y) const;
  void check_node(std::size_t i) const;

  Matrix h_;
  Vector z_;
};

struct LeastSquaresSet {
  Vector y_min_norm;
  std::vector<Vector> nullspace_basis;
  double min_residual = 0.0;
  bool unique = true;

  // Orthogonal distance from y to the affine set y_min_norm + span(nullspace_basis).
  double distance(std::span<const double> y) const;
};

LeastSquaresSet least_squares_set(const LinearEquationProblem& p,
                                  double rank_tol = kDefaultRankTol);

// sigma_m(H^T H): smallest eigenvalue of the Gram matrix.
double smallest_gram_eigenvalue(const LinearEquationProblem& p);

// 2 sigma_m(H^T H). Throws NotStronglyConvexError when rank(H) < m.
double strong_convexity_constant(const LinearEquationProblem& p,
                                 double rank_tol = kDefaultRankTol);

enum class RateRegime { PowerMin, LogCorrected, PowerLambda };

struct RatePrediction {
  RateRegime regime = RateRegime::PowerMin;
  double exponent = 0.0;     // decay exponent of the mean-state error bound
  double sigma_ratio = 0.0;  // sigma_m(H^T H) / N
};

inline constexpr double kRatioEqualityTol = 1e-9;

// Decay regime of ||mean(x) - y*|| for a power schedule c/(t0+t)^lambda.
// Throws OutOfRateScopeError unless lambda is in (0, 1] and H has full rank.
RatePrediction predict_rate(const LinearEquationProblem& p, const StepSizeSchedule& schedule);

std::string to_string(RateRegime regime);

}  // namespace lsflow

#endif  // LSFLOW_PROBLEM_HPP
