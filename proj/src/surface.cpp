#include "rsmkit/surface.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace rsm {

namespace {

// Relative singular-value cutoff below which the design is treated as
// rank deficient.
constexpr double kRankTolerance = 1e-10;

void require_finite_vector(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " contains a non-finite entry");
  }
}

void require_factor_count(int n) {
  if (n < 1 || n > kMaxFactors) {
    throw Error(ErrorCode::InvalidArgument,
                "factor count must be between 1 and " + std::to_string(kMaxFactors) +
                    ", got " + std::to_string(n));
  }
}

}  // namespace

int coefficient_count(int factors) {
  require_factor_count(factors);
  return 1 + factors + factors * (factors + 1) / 2;
}

SecondOrderSurface FitResult::surface() const { return unpack(coefficients, factors); }

Vector design_row(const Vector& x) {
  const int n = static_cast<int>(x.size());
  require_factor_count(n);
  require_finite_vector(x, "factor vector");

  Vector row(coefficient_count(n));
  row(0) = 1.0;
  int k = 1;
  for (int i = 0; i < n; ++i) row(k++) = x(i);
  for (int i = 0; i < n; ++i) row(k++) = x(i) * x(i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) row(k++) = x(i) * x(j);
  return row;
}

Matrix design_matrix(const Dataset& data) {
  if (data.runs() == 0) {
    throw Error(ErrorCode::InvalidArgument, "dataset has no runs");
  }
  if (data.response.size() != data.points.rows()) {
    throw Error(ErrorCode::InvalidArgument, "response length does not match run count");
  }
  const int n = data.factors();
  const int p = coefficient_count(n);
  Matrix design(data.runs(), p);
  for (int r = 0; r < data.runs(); ++r) {
    design.row(r) = design_row(data.points.row(r).transpose()).transpose();
  }
  return design;
}

Vector pack(const SecondOrderSurface& surface) {
  const int n = surface.factors();
  require_factor_count(n);
  if (surface.quadratic.rows() != n || surface.quadratic.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "quadratic block dimension mismatch");
  }
  Vector coeffs(coefficient_count(n));
  coeffs(0) = surface.intercept;
  int k = 1;
  for (int i = 0; i < n; ++i) coeffs(k++) = surface.linear(i);
  for (int i = 0; i < n; ++i) coeffs(k++) = surface.quadratic(i, i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) coeffs(k++) = 2.0 * surface.quadratic(i, j);
  return coeffs;
}

SecondOrderSurface unpack(const Vector& coefficients, int factors) {
  const int p = coefficient_count(factors);
  if (coefficients.size() != p) {
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(p) + " coefficients for " +
                    std::to_string(factors) + " factors, got " +
                    std::to_string(coefficients.size()));
  }
  require_finite_vector(coefficients, "coefficient vector");

  SecondOrderSurface surface;
  surface.intercept = coefficients(0);
  surface.linear = coefficients.segment(1, factors);
  surface.quadratic = Matrix::Zero(factors, factors);
  for (int i = 0; i < factors; ++i) surface.quadratic(i, i) = coefficients(1 + factors + i);
  int k = 1 + 2 * factors;
  for (int i = 0; i < factors; ++i) {
    for (int j = i + 1; j < factors; ++j) {
      const double half = coefficients(k++) / 2.0;
      surface.quadratic(i, j) = half;
      surface.quadratic(j, i) = half;
    }
  }
  return surface;
}

double predict(const SecondOrderSurface& surface, const Vector& x) {
  if (x.size() != surface.factors()) {
    throw Error(ErrorCode::InvalidArgument, "point dimension does not match surface");
  }
  require_finite_vector(x, "factor vector");
  return surface.intercept + surface.linear.dot(x) + x.dot(surface.quadratic * x);
}

DesignFactorization::DesignFactorization(const Matrix& points) {
  if (points.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "dataset has no runs");
  }
  if (!points.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "factor settings contain a non-finite entry");
  }
  points_ = points;
  Dataset shell{points, Vector::Zero(points.rows())};
  design_ = design_matrix(shell);

  // The singular values drive both the rank test and (X'X)^-1; going
  // through the SVD avoids squaring the condition number of X.
  Eigen::JacobiSVD<Matrix> svd(design_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv(sv.size() - 1) < kRankTolerance * sv(0)) {
    throw Error(ErrorCode::RankDeficient,
                "design matrix is numerically rank deficient (singular value ratio " +
                    std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
  }
  condition_ = sv(0) / sv(sv.size() - 1);
  xtx_inverse_ = svd.matrixV() * sv.array().square().inverse().matrix().asDiagonal() *
                 svd.matrixV().transpose();
  qr_.compute(design_);
}

FitResult DesignFactorization::fit(const Vector& response) const {
  if (response.size() != design_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "response length does not match design");
  }
  require_finite_vector(response, "response vector");
  const int p = coefficients();
  if (runs() <= p) {
    throw Error(ErrorCode::InsufficientData,
                "need more runs than coefficients (" + std::to_string(runs()) + " <= " +
                    std::to_string(p) + ")");
  }

  FitResult result;
  result.factors = factors();
  result.coefficients = qr_.solve(response);
  const Vector residual = response - design_ * result.coefficients;
  result.dof = runs() - p;
  result.sigma2 = residual.squaredNorm() / result.dof;
  result.xtx_inverse = xtx_inverse_;
  result.coefficient_cov = result.sigma2 * xtx_inverse_;
  return result;
}

FitResult fit(const Dataset& data) {
  if (data.runs() == 0) {
    throw Error(ErrorCode::InvalidArgument, "dataset has no runs");
  }
  // Report the clearer error when both apply: too few runs implies a
  // singular design as well.
  const int p = coefficient_count(data.factors());
  if (data.runs() <= p) {
    throw Error(ErrorCode::InsufficientData,
                "need more runs than coefficients (" + std::to_string(data.runs()) +
                    " <= " + std::to_string(p) + ")");
  }
  DesignFactorization factorization(data.points);
  return factorization.fit(data.response);
}

}  // namespace rsm
