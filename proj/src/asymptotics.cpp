#include "rsmkit/asymptotics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "rsmkit/normal.hpp"

namespace rsm {

namespace {

// Pairwise reduction: associative up to rounding that does not depend on
// the order replications were produced in, and with logarithmic error
// growth.
template <typename T>
T pairwise_sum(const std::vector<T>& items, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return items[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(items, lo, mid) + pairwise_sum(items, mid, hi);
}

}  // namespace

Matrix critical_point_covariance(const SensitivityMatrix& sensitivity,
                                 const Matrix& coefficient_cov) {
  const auto& jacobian = sensitivity.dx_dcoeff;
  if (jacobian.cols() != coefficient_cov.rows() ||
      coefficient_cov.rows() != coefficient_cov.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "coefficient covariance dimension does not match the sensitivity matrix");
  }
  Matrix covariance = jacobian * coefficient_cov * jacobian.transpose();
  covariance = 0.5 * (covariance + covariance.transpose()).eval();
  return covariance;
}

Matrix critical_point_covariance(const SensitivityMatrix& sensitivity, const FitResult& fit) {
  return critical_point_covariance(sensitivity, fit.coefficient_cov);
}

AsymptoticReport confidence_intervals(const CriticalPoint& point, const Matrix& covariance,
                                      double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie strictly in (0, 1)");
  }
  const int n = static_cast<int>(point.x.size());
  if (covariance.rows() != n || covariance.cols() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "covariance dimension does not match the critical point");
  }
  const double quantile = normal_quantile(0.5 + level / 2.0);

  AsymptoticReport report;
  report.covariance = covariance;
  report.level = level;
  report.std_errors = Vector(n);
  report.intervals = Matrix(n, 2);
  for (int k = 0; k < n; ++k) {
    // Tiny negative diagonals are rounding noise on a PSD matrix.
    report.std_errors(k) = std::sqrt(std::max(0.0, covariance(k, k)));
    report.intervals(k, 0) = point.x(k) - quantile * report.std_errors(k);
    report.intervals(k, 1) = point.x(k) + quantile * report.std_errors(k);
  }
  return report;
}

MonteCarloStudy monte_carlo_study(const SecondOrderSurface& truth, const Region& region,
                                  const Matrix& design_points, double sigma, int replications,
                                  std::uint64_t seed, double level) {
  if (replications < 100) {
    throw Error(ErrorCode::InvalidArgument, "need at least 100 replications");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise level must be finite and non-negative");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie strictly in (0, 1)");
  }
  if (design_points.cols() != truth.factors()) {
    throw Error(ErrorCode::InvalidArgument, "design factor count does not match the surface");
  }

  const DesignFactorization factorization(design_points);
  const int n = truth.factors();
  const int runs = factorization.runs();
  const CriticalPoint truth_point = solve(truth, region);
  const Vector mean_response = factorization.design() * pack(truth);

  MonteCarloStudy study;
  study.replications = replications;
  study.seed = seed;
  study.level = level;
  study.sigma = sigma;
  study.truth_status = truth_point.status;
  study.truth_x = truth_point.x;
  study.outcomes.reserve(replications);

  std::vector<Vector> samples;
  samples.reserve(replications);
  Eigen::VectorXi covered = Eigen::VectorXi::Zero(n);

  for (int r = 0; r < replications; ++r) {
    NoiseStream stream(seed, static_cast<std::uint64_t>(r));
    Vector response = mean_response;
    for (int i = 0; i < runs; ++i) response(i) += sigma * stream.gaussian();

    CriticalPoint point;
    try {
      const FitResult refit = factorization.fit(response);
      point = solve(refit.surface(), region);
      study.outcomes.push_back({r, true, point.status, point.x});
      if (point.status != truth_point.status) {
        ++study.status_flips;
        continue;
      }
      const SensitivityMatrix jacobian = sensitivity(refit.surface(), point);
      const Matrix covariance = critical_point_covariance(jacobian, refit);
      const AsymptoticReport report = confidence_intervals(point, covariance, level);
      for (int k = 0; k < n; ++k) {
        if (report.intervals(k, 0) <= truth_point.x(k) &&
            truth_point.x(k) <= report.intervals(k, 1)) {
          ++covered(k);
        }
      }
    } catch (const Error&) {
      ++study.solver_errors;
      if (study.outcomes.size() == static_cast<std::size_t>(r)) {
        study.outcomes.push_back({r, false, PointStatus::Interior, Vector()});
      }
      continue;
    }
    samples.push_back(point.x);
  }

  study.used = static_cast<int>(samples.size());
  study.coverage = Vector::Zero(n);
  study.empirical_cov = Matrix::Zero(n, n);
  if (study.used > 0) {
    study.coverage = covered.cast<double>() / static_cast<double>(study.used);
  }
  if (study.used > 1) {
    const Vector mean = pairwise_sum(samples, 0, samples.size()) / study.used;
    std::vector<Matrix> squares;
    squares.reserve(samples.size());
    for (const Vector& sample : samples) {
      const Vector centered = sample - mean;
      squares.push_back(centered * centered.transpose());
    }
    study.empirical_cov = pairwise_sum(squares, 0, squares.size()) / (study.used - 1);
  }
  return study;
}

std::string replication_csv(const MonteCarloStudy& study) {
  const int n = static_cast<int>(study.truth_x.size());
  std::string csv = "replication,status";
  for (int k = 0; k < n; ++k) csv += ",x" + std::to_string(k + 1);
  csv += "\n";
  char cell[64];
  for (const ReplicationOutcome& outcome : study.outcomes) {
    if (!outcome.solved) {
      csv += std::to_string(outcome.replication) + ",error";
      for (int k = 0; k < n; ++k) csv += ",";
      csv += "\n";
      continue;
    }
    csv += std::to_string(outcome.replication) + "," + point_status_name(outcome.status);
    for (int k = 0; k < n; ++k) {
      std::snprintf(cell, sizeof(cell), ",%.17g", outcome.x(k));
      csv += cell;
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace rsm
