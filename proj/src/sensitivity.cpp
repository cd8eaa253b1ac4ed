#include "rsmkit/sensitivity.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace rsm {

namespace {

constexpr double kSingularityTolerance = 1e-10;  // relative smallest singular value
constexpr double kStrictComplementarityFloor = 1e-10;
constexpr double kTwoPathTolerance = 1e-9;

void require_boundary(const CriticalPoint& point) {
  if (point.status != PointStatus::Boundary) {
    throw Error(ErrorCode::InvalidArgument,
                "operation requires a boundary critical point, got an interior one");
  }
}

Matrix assemble(const BorderedSystem& system) {
  const int n = static_cast<int>(system.hessian.rows());
  Matrix jacobian(n + 1, n + 1);
  jacobian.topLeftCorner(n, n) = system.hessian;
  jacobian.topRightCorner(n, 1) = system.constraint_gradient;
  jacobian.bottomLeftCorner(1, n) = system.constraint_gradient.transpose();
  jacobian(n, n) = 0.0;
  return jacobian;
}

void require_nonsingular(const Matrix& jacobian) {
  Eigen::JacobiSVD<Matrix> svd(jacobian);
  const Vector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > kSingularityTolerance * sv(0))) {
    throw Error(ErrorCode::SingularJacobian,
                "bordered system is numerically singular (singular value ratio " +
                    std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
  }
}

}  // namespace

Matrix design_gradient(const Vector& x) {
  const int n = static_cast<int>(x.size());
  const int p = coefficient_count(n);
  Matrix gradient = Matrix::Zero(n, p);
  gradient.block(0, 1, n, n) = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) gradient(i, 1 + n + i) = 2.0 * x(i);
  int k = 1 + 2 * n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      gradient(i, k) = x(j);
      gradient(j, k) = x(i);
      ++k;
    }
  }
  return gradient;
}

BorderedSystem bordered_system(const SecondOrderSurface& surface, const CriticalPoint& point) {
  require_boundary(point);
  const int n = surface.factors();
  if (point.x.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "critical point dimension does not match surface");
  }
  BorderedSystem system;
  system.hessian =
      2.0 * (surface.quadratic + point.multiplier * Matrix::Identity(n, n));
  system.constraint_gradient = 2.0 * point.x;
  system.rhs = Matrix::Zero(n + 1, coefficient_count(n));
  system.rhs.topRows(n) = design_gradient(point.x);
  return system;
}

Matrix kkt_jacobian(const SecondOrderSurface& surface, const CriticalPoint& point) {
  const Matrix jacobian = assemble(bordered_system(surface, point));
  require_nonsingular(jacobian);
  return jacobian;
}

Matrix bordered_inverse(const Matrix& hessian, const Vector& constraint_gradient) {
  const int n = static_cast<int>(hessian.rows());
  if (hessian.cols() != n || constraint_gradient.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "bordered blocks have inconsistent dimensions");
  }
  Eigen::FullPivLU<Matrix> lu(hessian);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::SingularJacobian, "hessian block is singular");
  }
  const Vector solved = lu.solve(constraint_gradient);
  const double schur = constraint_gradient.dot(solved);
  if (schur == 0.0 || !std::isfinite(schur)) {
    throw Error(ErrorCode::SingularJacobian, "Schur scalar of the bordered system vanishes");
  }

  Matrix inverse(n + 1, n + 1);
  const Matrix hessian_inverse = lu.inverse();
  inverse.topLeftCorner(n, n) = hessian_inverse - solved * solved.transpose() / schur;
  inverse.topRightCorner(n, 1) = solved / schur;
  inverse.bottomLeftCorner(1, n) = solved.transpose() / schur;
  inverse(n, n) = -1.0 / schur;
  return inverse;
}

Matrix solve_bordered(const BorderedSystem& system) {
  const Matrix jacobian = assemble(system);
  require_nonsingular(jacobian);

  const Matrix direct = -Eigen::FullPivLU<Matrix>(jacobian).solve(system.rhs);
  const Matrix via_blocks =
      -(bordered_inverse(system.hessian, system.constraint_gradient) * system.rhs);

  const double gap = (direct - via_blocks).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
  if (gap > kTwoPathTolerance * scale) {
    throw Error(ErrorCode::SingularJacobian,
                "direct and block-inverse solutions disagree (gap " + std::to_string(gap) +
                    "); the bordered system is too ill conditioned");
  }
  return direct;
}

const char* sensitivity_method_name(SensitivityMethod method) {
  switch (method) {
    case SensitivityMethod::InteriorClosedForm: return "InteriorClosedForm";
    case SensitivityMethod::BoundaryClosedForm: return "BoundaryClosedForm";
    case SensitivityMethod::BorderedSolve: return "BorderedSolve";
    case SensitivityMethod::FiniteDifference: return "FiniteDifference";
  }
  return "unknown";
}

SensitivityMatrix sensitivity_interior(const SecondOrderSurface& surface,
                                       const CriticalPoint& point) {
  if (point.status != PointStatus::Interior) {
    throw Error(ErrorCode::InvalidArgument,
                "operation requires an interior critical point, got a boundary one");
  }
  const ConvexityReport convexity = convexity_report(surface);
  if (!convexity.strictly_convex) {
    throw Error(ErrorCode::NotConvex,
                "interior sensitivities require a strictly convex surface");
  }
  SensitivityMatrix result;
  result.dx_dcoeff = -0.5 * surface.quadratic.ldlt().solve(design_gradient(point.x));
  result.method = SensitivityMethod::InteriorClosedForm;
  return result;
}

SensitivityMatrix sensitivity_boundary(const SecondOrderSurface& surface,
                                       const CriticalPoint& point) {
  require_boundary(point);
  if (!(point.multiplier > kStrictComplementarityFloor)) {
    throw Error(ErrorCode::StrictComplementarityViolated,
                "boundary sensitivities need a multiplier bounded away from zero, got " +
                    std::to_string(point.multiplier));
  }
  const BorderedSystem system = bordered_system(surface, point);

  // Closed form: with G the hessian block and M the design gradient,
  // dx/db = G^-1 (x x' G^-1 / (x' G^-1 x) - I) M. Tangency x' dx/db = 0
  // holds by construction.
  Eigen::LDLT<Matrix> hessian(system.hessian);
  if (hessian.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularJacobian, "hessian block factorization failed");
  }
  const Matrix& gradient = system.rhs;  // top n rows hold the design gradient
  const int n = surface.factors();
  const Matrix solved_gradient = hessian.solve(gradient.topRows(n));
  const Vector solved_x = hessian.solve(point.x);
  const double schur = point.x.dot(solved_x);
  if (!(schur != 0.0) || !std::isfinite(schur)) {
    throw Error(ErrorCode::SingularJacobian, "Schur scalar of the bordered system vanishes");
  }
  const Eigen::RowVectorXd projected = point.x.transpose() * solved_gradient;

  SensitivityMatrix result;
  result.dx_dcoeff = solved_x * (projected / schur) - solved_gradient;
  result.dmultiplier_dcoeff = (-projected / (2.0 * schur)).transpose();
  result.method = SensitivityMethod::BoundaryClosedForm;

  const Matrix bordered = solve_bordered(system);
  const double gap = (result.dx_dcoeff - bordered.topRows(n)).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, result.dx_dcoeff.cwiseAbs().maxCoeff());
  if (gap > kTwoPathTolerance * scale) {
    throw Error(ErrorCode::SingularJacobian,
                "closed form and bordered solve disagree (gap " + std::to_string(gap) + ")");
  }
  return result;
}

SensitivityMatrix sensitivity_bordered(const SecondOrderSurface& surface,
                                       const CriticalPoint& point) {
  const BorderedSystem system = bordered_system(surface, point);
  const Matrix solved = solve_bordered(system);
  const int n = surface.factors();
  SensitivityMatrix result;
  result.dx_dcoeff = solved.topRows(n);
  result.dmultiplier_dcoeff = solved.row(n).transpose();
  result.method = SensitivityMethod::BorderedSolve;
  return result;
}

SensitivityMatrix sensitivity(const SecondOrderSurface& surface, const CriticalPoint& point) {
  return point.status == PointStatus::Interior ? sensitivity_interior(surface, point)
                                               : sensitivity_boundary(surface, point);
}

SensitivityMatrix finite_difference_sensitivity(const SecondOrderSurface& surface,
                                                const Region& region, double step,
                                                bool allow_nonconvex) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  }
  const int n = surface.factors();
  const int p = coefficient_count(n);
  const Vector coefficients = pack(surface);
  const CriticalPoint base = solve(surface, region, allow_nonconvex);

  SensitivityMatrix result;
  result.dx_dcoeff = Matrix::Zero(n, p);
  if (base.status == PointStatus::Boundary) {
    result.dmultiplier_dcoeff = Vector::Zero(p);
  }
  result.method = SensitivityMethod::FiniteDifference;

  for (int k = 0; k < p; ++k) {
    const double scaled = step * (1.0 + std::abs(coefficients(k)));
    Vector forward = coefficients;
    Vector backward = coefficients;
    forward(k) += scaled;
    backward(k) -= scaled;
    const CriticalPoint plus = solve(unpack(forward, n), region, allow_nonconvex);
    const CriticalPoint minus = solve(unpack(backward, n), region, allow_nonconvex);
    if (plus.status != base.status || minus.status != base.status) {
      throw Error(ErrorCode::StatusFlip,
                  "perturbing coefficient " + std::to_string(k) +
                      " changes the interior/boundary status; differences are meaningless "
                      "across the flip");
    }
    result.dx_dcoeff.col(k) = (plus.x - minus.x) / (2.0 * scaled);
    if (base.status == PointStatus::Boundary) {
      result.dmultiplier_dcoeff(k) = (plus.multiplier - minus.multiplier) / (2.0 * scaled);
    }
  }
  return result;
}

}  // namespace rsm
