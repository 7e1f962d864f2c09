#ifndef LSFLOW_NUMERICS_HPP
#define LSFLOW_NUMERICS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsflow {

using Vector = std::vector<double>;

// Thrown when operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotSymmetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPositiveDefiniteError : public std::domain_error {
 public:
  NotPositiveDefiniteError() : std::domain_error("not positive definite") {}
};

// Dense row-major real matrix. Small sizes only (a few dozen rows).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& entries() const { return data_; }

  Matrix transpose() const;
  Vector apply(std::span<const double> x) const;             // A x
  Vector apply_transpose(std::span<const double> x) const;   // A^T x
  Matrix gram() const;                                       // A^T A

  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  bool all_finite() const;
  double max_abs() const;
  double frobenius_norm() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Eigenvalues ascending; column k of `vectors` pairs with values[k].
struct SymEig {
  Vector values;
  Matrix vectors;

  Vector vector(std::size_t k) const;
};

// Cyclic Jacobi rotations. Throws DimensionError / NotSymmetricError.
SymEig sym_eigen(const Matrix& s);

// Cholesky solve. Throws NotPositiveDefiniteError on a non-positive pivot.
Vector solve_spd(const Matrix& s, std::span<const double> b);

struct LeastSquaresSolution {
  Vector y_min_norm;
  std::vector<Vector> nullspace_basis;  // orthonormal
  double min_residual = 0.0;            // ||z - H y_min_norm||^2
};

inline constexpr double kDefaultRankTol = 1e-8;

// Minimum-norm least squares via the eigensystem of H^T H. A unit
// eigenvector v is treated as a null direction when
// ||H v|| <= rank_tol * ||H||_2.
LeastSquaresSolution min_norm_least_squares(const Matrix& h, std::span<const double> z,
                                            double rank_tol = kDefaultRankTol);

// A (x) I_m.
Matrix kron_identity(const Matrix& a, std::size_t m);

// Small vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
Vector axpy(double a, std::span<const double> x, std::span<const double> y);  // a x + y
Vector sub(std::span<const double> a, std::span<const double> b);

}  // namespace lsflow

#endif  // LSFLOW_NUMERICS_HPP
