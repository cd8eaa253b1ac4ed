#include "rsmkit/report.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <optional>

#include "rsmkit/json_writer.hpp"

namespace rsm {

namespace {

void write_fit(JsonWriter& json, const FitResult& fit) {
  json.begin_object();
  json.key("n");
  json.value(fit.factors);
  json.key("beta_hat");
  json.value(fit.coefficients);
  json.key("sigma2_hat");
  json.value(fit.sigma2);
  json.key("dof");
  json.value(fit.dof);
  json.key("cov_beta");
  json.value(fit.coefficient_cov);
  json.end_object();
}

void write_critical_point(JsonWriter& json, const CriticalPoint& point) {
  json.begin_object();
  json.key("x_star");
  json.value(point.x);
  json.key("lambda_star");
  json.value(point.multiplier);
  json.key("status");
  json.value(point_status_name(point.status));
  json.key("residuals");
  json.begin_object();
  json.key("stationarity");
  json.value(point.residuals.stationarity);
  json.key("primal");
  json.value(point.residuals.primal);
  json.key("complementarity");
  json.value(point.residuals.complementarity);
  json.key("dual");
  json.value(point.residuals.dual);
  json.end_object();
  json.key("extension");
  json.value(point.extension);
  json.key("strict_complementarity");
  json.value(point.strict_complementarity);
  json.end_object();
}

void write_sensitivity(JsonWriter& json, const SensitivityMatrix& sensitivity) {
  json.begin_object();
  json.key("dxdbeta");
  json.value(sensitivity.dx_dcoeff);
  json.key("dlambdadbeta");
  if (sensitivity.dmultiplier_dcoeff.size() > 0) {
    json.value(sensitivity.dmultiplier_dcoeff);
  } else {
    json.null();
  }
  json.key("method");
  json.value(sensitivity_method_name(sensitivity.method));
  json.end_object();
}

void write_asymptotics(JsonWriter& json, const AsymptoticReport& report) {
  json.begin_object();
  json.key("xi");
  json.value(report.covariance);
  json.key("std_errors");
  json.value(report.std_errors);
  json.key("confidence_intervals");
  json.value(report.intervals);
  json.key("level");
  json.value(report.level);
  json.end_object();
}

void write_mc_study(JsonWriter& json, const MonteCarloStudy& study) {
  json.begin_object();
  json.key("replications");
  json.value(study.replications);
  json.key("seed");
  json.value(study.seed);
  json.key("level");
  json.value(study.level);
  json.key("sigma");
  json.value(study.sigma);
  json.key("truth_status");
  json.value(point_status_name(study.truth_status));
  json.key("truth_x");
  json.value(study.truth_x);
  json.key("empirical_cov");
  json.value(study.empirical_cov);
  json.key("empirical_coverage");
  json.value(study.coverage);
  json.key("status_flip_count");
  json.value(study.status_flips);
  json.key("solver_error_count");
  json.value(study.solver_errors);
  json.key("used_replications");
  json.value(study.used);
  json.end_object();
}

// Residuals of the differentiated first-order system
//   hessian * dx/db + constraint_gradient * dm/db' + design_gradient = 0
//   x' dx/db = 0 (active constraint only)
// for a candidate sensitivity matrix. The shipped closed form drives these
// to rounding level; the sign-flipped hessian does not.
struct SignCheck {
  double stationarity = 0.0;
  double tangency = 0.0;
};

SignCheck differentiated_system_residual(const SecondOrderSurface& surface,
                                         const CriticalPoint& point,
                                         const Matrix& dx_dcoeff,
                                         const Vector& dmultiplier_dcoeff) {
  const int n = surface.factors();
  const Matrix gradient = design_gradient(point.x);
  const Matrix hessian =
      2.0 * (surface.quadratic + point.multiplier * Matrix::Identity(n, n));
  Matrix residual = hessian * dx_dcoeff + gradient;
  if (point.status == PointStatus::Boundary) {
    residual += 2.0 * point.x * dmultiplier_dcoeff.transpose();
  }
  SignCheck check;
  check.stationarity = residual.cwiseAbs().maxCoeff();
  if (point.status == PointStatus::Boundary) {
    check.tangency = (point.x.transpose() * dx_dcoeff).cwiseAbs().maxCoeff();
  }
  return check;
}

// The same closed form evaluated with the hessian sign flipped to
// 2 (Q - multiplier I); reported alongside the shipped convention so the
// two candidates can be compared on equal footing. Singular flipped
// hessians leave the entry null.
std::optional<SensitivityMatrix> flipped_sign_sensitivity(const SecondOrderSurface& surface,
                                                          const CriticalPoint& point) {
  const int n = surface.factors();
  SensitivityMatrix result;
  if (point.status == PointStatus::Interior) {
    Eigen::FullPivLU<Matrix> lu(surface.quadratic);
    if (!lu.isInvertible()) return std::nullopt;
    result.dx_dcoeff = 0.5 * lu.solve(design_gradient(point.x));
    result.method = SensitivityMethod::InteriorClosedForm;
    return result;
  }
  const Matrix flipped =
      2.0 * (surface.quadratic - point.multiplier * Matrix::Identity(n, n));
  Eigen::FullPivLU<Matrix> lu(flipped);
  if (!lu.isInvertible()) return std::nullopt;
  const Matrix solved_gradient = lu.solve(design_gradient(point.x));
  const Vector solved_x = lu.solve(point.x);
  const double schur = point.x.dot(solved_x);
  if (schur == 0.0 || !std::isfinite(schur)) return std::nullopt;
  const Eigen::RowVectorXd projected = point.x.transpose() * solved_gradient;
  result.dx_dcoeff = solved_x * (projected / schur) - solved_gradient;
  result.dmultiplier_dcoeff = (-projected / (2.0 * schur)).transpose();
  result.method = SensitivityMethod::BoundaryClosedForm;
  return result;
}

double kkt_jacobian_condition(const SecondOrderSurface& surface, const CriticalPoint& point) {
  const Matrix jacobian = kkt_jacobian(surface, point);
  Eigen::JacobiSVD<Matrix> svd(jacobian);
  const Vector& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

void write_diagnostics(JsonWriter& json, const SecondOrderSurface& surface,
                       const CriticalPoint& point, const SensitivityMatrix& shipped,
                       const Region& region, double design_condition, bool fd_check,
                       double fd_step) {
  json.begin_object();
  json.key("design_condition");
  json.value(design_condition);

  json.key("kkt_jacobian_condition");
  if (point.status == PointStatus::Boundary && point.strict_complementarity) {
    json.value(kkt_jacobian_condition(surface, point));
  } else {
    json.null();
  }

  // Distance from the complementarity kink: the multiplier on the
  // boundary, the unused slack in the interior.
  json.key("strict_complementarity_margin");
  json.value(point.status == PointStatus::Boundary ? point.multiplier
                                                   : region.radius - point.x.norm());
  json.key("strict_complementarity");
  json.value(point.strict_complementarity);

  const SignCheck shipped_check = differentiated_system_residual(
      surface, point, shipped.dx_dcoeff, shipped.dmultiplier_dcoeff);
  const std::optional<SensitivityMatrix> flipped = flipped_sign_sensitivity(surface, point);

  json.key("hessian_sign_check");
  json.begin_object();
  json.key("shipped_convention");
  json.value(point.status == PointStatus::Boundary
                 ? "hessian 2(Q + lambda I), dxdbeta from the bordered system"
                 : "dxdbeta = -1/2 Q^-1 M");
  json.key("flipped_convention");
  json.value(point.status == PointStatus::Boundary ? "hessian 2(Q - lambda I)"
                                                   : "dxdbeta = +1/2 Q^-1 M");
  json.key("shipped_stationarity_residual");
  json.value(shipped_check.stationarity);
  json.key("shipped_tangency_residual");
  json.value(shipped_check.tangency);
  if (flipped) {
    const SignCheck flipped_check = differentiated_system_residual(
        surface, point, flipped->dx_dcoeff, flipped->dmultiplier_dcoeff);
    json.key("flipped_stationarity_residual");
    json.value(flipped_check.stationarity);
    json.key("flipped_tangency_residual");
    json.value(flipped_check.tangency);
  } else {
    json.key("flipped_stationarity_residual");
    json.null();
    json.key("flipped_tangency_residual");
    json.null();
  }
  json.end_object();

  json.key("finite_difference_check");
  if (fd_check) {
    const SensitivityMatrix differenced =
        finite_difference_sensitivity(surface, region, fd_step);
    json.begin_object();
    json.key("step");
    json.value(fd_step);
    json.key("max_abs_deviation_shipped");
    json.value((differenced.dx_dcoeff - shipped.dx_dcoeff).cwiseAbs().maxCoeff());
    json.key("max_abs_deviation_flipped");
    if (flipped) {
      json.value((differenced.dx_dcoeff - flipped->dx_dcoeff).cwiseAbs().maxCoeff());
    } else {
      json.null();
    }
    json.key("dxdbeta");
    json.value(differenced.dx_dcoeff);
    json.end_object();
  } else {
    json.null();
  }

  json.end_object();
}

}  // namespace

std::string fit_json(const FitResult& fit) {
  JsonWriter json;
  write_fit(json, fit);
  return json.str();
}

std::string critical_point_json(const CriticalPoint& point) {
  JsonWriter json;
  write_critical_point(json, point);
  return json.str();
}

std::string sensitivity_json(const SensitivityMatrix& sensitivity) {
  JsonWriter json;
  write_sensitivity(json, sensitivity);
  return json.str();
}

std::string asymptotic_report_json(const AsymptoticReport& report) {
  JsonWriter json;
  write_asymptotics(json, report);
  return json.str();
}

std::string monte_carlo_json(const MonteCarloStudy& study) {
  JsonWriter json;
  write_mc_study(json, study);
  return json.str();
}

std::string fit_report(const Dataset& data) {
  JsonWriter json;
  write_fit(json, fit(data));
  return json.str();
}

std::string optimize_report(const Dataset& data, const Region& region) {
  const FitResult fitted = fit(data);
  const CriticalPoint point = solve(fitted.surface(), region);
  JsonWriter json;
  json.begin_object();
  json.key("fit");
  write_fit(json, fitted);
  json.key("critical_point");
  write_critical_point(json, point);
  json.end_object();
  return json.str();
}

std::string analyze_report(const Dataset& data, const Region& region, double level,
                           bool fd_check, double fd_step) {
  const DesignFactorization factorization(data.points);
  const FitResult fitted = factorization.fit(data.response);
  const SecondOrderSurface surface = fitted.surface();
  const CriticalPoint point = solve(surface, region);
  const SensitivityMatrix jacobian = sensitivity(surface, point);
  const Matrix covariance = critical_point_covariance(jacobian, fitted);
  const AsymptoticReport asymptotics = confidence_intervals(point, covariance, level);

  JsonWriter json;
  json.begin_object();
  json.key("fit");
  write_fit(json, fitted);
  json.key("critical_point");
  write_critical_point(json, point);
  json.key("sensitivity");
  write_sensitivity(json, jacobian);
  json.key("asymptotics");
  write_asymptotics(json, asymptotics);
  json.key("diagnostics");
  write_diagnostics(json, surface, point, jacobian, region, factorization.condition(),
                    fd_check, fd_step);
  json.end_object();
  return json.str();
}

}  // namespace rsm
