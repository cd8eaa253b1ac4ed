#pragma once

#include <cstdint>
#include <vector>

#include "rsmkit/optimizer.hpp"
#include "rsmkit/sensitivity.hpp"
#include "rsmkit/surface.hpp"

namespace rsm {

/// Delta-method covariance of the critical point: D Cov(b) D' with D the
/// sensitivity matrix and Cov(b) the coefficient covariance.
Matrix critical_point_covariance(const SensitivityMatrix& sensitivity,
                                 const Matrix& coefficient_cov);
Matrix critical_point_covariance(const SensitivityMatrix& sensitivity, const FitResult& fit);

struct AsymptoticReport {
  Matrix covariance;  // n x n
  Vector std_errors;  // sqrt of the diagonal
  Matrix intervals;   // n x 2, per-coordinate Wald bounds
  double level = 0.95;
};

AsymptoticReport confidence_intervals(const CriticalPoint& point, const Matrix& covariance,
                                      double level);

struct ReplicationOutcome {
  int replication = 0;
  bool solved = false;
  PointStatus status = PointStatus::Interior;
  Vector x;
};

struct MonteCarloStudy {
  int replications = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
  double sigma = 0.0;
  PointStatus truth_status = PointStatus::Interior;
  Vector truth_x;
  Matrix empirical_cov;  // over replications matching the truth status
  Vector coverage;       // per-coordinate interval coverage rate
  int status_flips = 0;
  int solver_errors = 0;
  int used = 0;
  std::vector<ReplicationOutcome> outcomes;
};

/// Simulates the full fit-and-optimize pipeline on a fixed design:
/// every replication draws fresh Gaussian noise, refits, re-solves, and
/// builds its own delta-method intervals. Replications whose status
/// differs from the truth (or whose solve fails) are counted and left out
/// of the statistics. Identical seeds give identical studies.
MonteCarloStudy monte_carlo_study(const SecondOrderSurface& truth, const Region& region,
                                  const Matrix& design_points, double sigma, int replications,
                                  std::uint64_t seed, double level);

/// CSV of the per-replication critical points (replication, status, x...).
std::string replication_csv(const MonteCarloStudy& study);

}  // namespace rsm
