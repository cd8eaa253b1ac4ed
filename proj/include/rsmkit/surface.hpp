#pragma once

#include <Eigen/QR>

#include "rsmkit/errors.hpp"
#include "rsmkit/linalg.hpp"

namespace rsm {

/// Largest supported number of factors. Everything is dense; the
/// coefficient count grows quadratically, so this keeps p at most 231.
inline constexpr int kMaxFactors = 20;

/// p = 1 + n + n(n+1)/2 packed coefficients for n factors.
int coefficient_count(int factors);

/// Quadratic response surface y(x) = intercept + linear'x + x'Q x with Q
/// symmetric. The packed layout is (intercept; linear terms; squared terms;
/// cross terms ordered lexicographically by factor pair).
struct SecondOrderSurface {
  double intercept = 0.0;
  Vector linear;
  Matrix quadratic;

  int factors() const { return static_cast<int>(linear.size()); }
};

struct Dataset {
  Matrix points;    // runs x factors, coded units
  Vector response;  // one observation per run

  int factors() const { return static_cast<int>(points.cols()); }
  int runs() const { return static_cast<int>(points.rows()); }
};

struct FitResult {
  int factors = 0;
  Vector coefficients;     // packed, length p
  double sigma2 = 0.0;     // residual variance estimate
  Matrix xtx_inverse;      // (X'X)^-1, p x p
  Matrix coefficient_cov;  // sigma2 * (X'X)^-1
  int dof = 0;             // runs - p

  SecondOrderSurface surface() const;
};

/// Row of monomials (1, x_1..x_n, x_1^2..x_n^2, x_1 x_2, ...) evaluated at x.
Vector design_row(const Vector& x);

/// Stacks design_row over every run. Empty datasets are rejected.
Matrix design_matrix(const Dataset& data);

Vector pack(const SecondOrderSurface& surface);
SecondOrderSurface unpack(const Vector& coefficients, int factors);

double predict(const SecondOrderSurface& surface, const Vector& x);

/// QR factorization of a fixed design, reusable across many response
/// vectors (simulation studies refit the same design thousands of times).
class DesignFactorization {
 public:
  explicit DesignFactorization(const Matrix& points);

  FitResult fit(const Vector& response) const;

  const Matrix& points() const { return points_; }
  const Matrix& design() const { return design_; }
  const Matrix& xtx_inverse() const { return xtx_inverse_; }
  int runs() const { return static_cast<int>(design_.rows()); }
  int factors() const { return static_cast<int>(points_.cols()); }
  int coefficients() const { return static_cast<int>(design_.cols()); }

  /// Spectral condition number of the design matrix.
  double condition() const { return condition_; }

 private:
  Matrix points_;
  Matrix design_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
  Matrix xtx_inverse_;
  double condition_ = 0.0;
};

/// Least squares fit of the full second-order model.
FitResult fit(const Dataset& data);

}  // namespace rsm
