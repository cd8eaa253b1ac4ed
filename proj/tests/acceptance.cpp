// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Runs the library the way the tool does, plus the
// actual CLI binary for the determinism checks. Exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <json.hpp>

#include "oracles.hpp"
#include "rsmkit/asymptotics.hpp"
#include "rsmkit/io.hpp"
#include "rsmkit/report.hpp"
#include "rsmkit/sensitivity.hpp"
#include "subprocess.hpp"

using namespace rsm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  return buffer;
}

Vector vec6(double a, double b, double c, double d, double e, double f) {
  Vector v(6);
  v << a, b, c, d, e, f;
  return v;
}

const Vector kReferenceCoefficients = vec6(0, -2, 0, 1, 1, 0);

Outcome analytic_boundary_instance() {
  const SecondOrderSurface surface = unpack(kReferenceCoefficients, 2);
  const Region region{0.5};

  CriticalPoint point = solve(surface, region);
  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 25; ++rep) {
    const auto start = Clock::now();
    point = solve(surface, region);
    best = std::min(best, seconds_since(start));
  }

  Vector expected(2);
  expected << 0.5, 0.0;
  const double x_error = (point.x - expected).cwiseAbs().maxCoeff();
  const double multiplier_error = std::abs(point.multiplier - 1.0);
  const double worst_residual =
      std::max({point.residuals.stationarity, point.residuals.primal,
                point.residuals.complementarity, point.residuals.dual});

  Outcome outcome;
  outcome.pass = point.status == PointStatus::Boundary && x_error <= 1e-10 &&
                 multiplier_error <= 1e-10 && worst_residual <= 1e-10 && best < 1e-3;
  outcome.detail = "x error " + fmt(x_error) + ", multiplier error " + fmt(multiplier_error) +
                   ", max residual " + fmt(worst_residual) + ", solve time " + fmt(best * 1e3) +
                   " ms";
  return outcome;
}

Outcome analytic_interior_instance() {
  const SecondOrderSurface surface = unpack(kReferenceCoefficients, 2);
  const CriticalPoint point = solve(surface, Region{2.0});
  Vector expected(2);
  expected << 1.0, 0.0;
  const double x_error = (point.x - expected).cwiseAbs().maxCoeff();
  const SensitivityMatrix jacobian = sensitivity(surface, point);
  const double intercept_column = jacobian.dx_dcoeff.col(0).cwiseAbs().maxCoeff();

  Outcome outcome;
  outcome.pass = point.status == PointStatus::Interior && point.multiplier == 0.0 &&
                 x_error <= 1e-10 && intercept_column == 0.0;
  outcome.detail = "x error " + fmt(x_error) + ", multiplier " + fmt(point.multiplier) +
                   ", intercept column max " + fmt(intercept_column);
  return outcome;
}

Outcome design_gradient_oracle() {
  const auto start = Clock::now();
  NoiseStream rng(1001, 0);
  double worst_identity = 0.0;
  double worst_difference = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_bits() % 5);
    Vector coefficients(coefficient_count(n));
    for (int i = 0; i < coefficients.size(); ++i) coefficients(i) = rng.gaussian();
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = 2.0 * rng.gaussian();

    const SecondOrderSurface surface = unpack(coefficients, n);
    const Matrix gradient = design_gradient(x);
    const Vector via_gradient = gradient * coefficients;
    const Vector direct = surface.linear + 2.0 * surface.quadratic * x;
    worst_identity = std::max(worst_identity,
                              (via_gradient - direct).norm() / (1.0 + direct.norm()));
    worst_difference = std::max(
        worst_difference, (gradient - oracle::fd_design_gradient(x)).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);

  Outcome outcome;
  outcome.pass = worst_identity <= 1e-12 && worst_difference <= 1e-8 && elapsed < 5.0;
  outcome.detail = "identity gap " + fmt(worst_identity) + ", FD gap " + fmt(worst_difference) +
                   ", " + fmt(elapsed) + " s";
  return outcome;
}

struct SensitivityBatch {
  std::vector<SecondOrderSurface> surfaces;
  std::vector<Region> regions;
  std::vector<CriticalPoint> points;
  std::vector<SensitivityMatrix> closed;
};

SensitivityBatch generate_batch(bool boundary, int count) {
  SensitivityBatch batch;
  NoiseStream rng(boundary ? 2002 : 3003, 0);
  while (static_cast<int>(batch.surfaces.size()) < count) {
    const int n = 1 + static_cast<int>(rng.next_bits() % 5);
    const auto [surface, region] = oracle::random_instance(rng, n, boundary);
    const CriticalPoint point = solve(surface, region);
    if (point.status != (boundary ? PointStatus::Boundary : PointStatus::Interior)) continue;
    // Conditioning gate on the system the sensitivities invert.
    Matrix system;
    if (boundary) {
      if (point.multiplier < 1e-3) continue;  // stay clear of status flips
      system = kkt_jacobian(surface, point);
    } else {
      system = 2.0 * surface.quadratic;
    }
    Eigen::JacobiSVD<Matrix> svd(system);
    if (svd.singularValues()(0) >
        1e6 * svd.singularValues()(svd.singularValues().size() - 1)) {
      continue;
    }
    batch.surfaces.push_back(surface);
    batch.regions.push_back(region);
    batch.points.push_back(point);
    batch.closed.push_back(sensitivity(surface, point));
  }
  return batch;
}

Outcome sensitivity_oracle() {
  const auto start = Clock::now();
  const SensitivityBatch boundary = generate_batch(true, 50);
  const SensitivityBatch interior = generate_batch(false, 50);

  double worst_fd = 0.0;        // excess over the mixed abs/rel tolerance
  double worst_two_path = 0.0;  // closed form vs bordered solve
  for (const SensitivityBatch* batch : {&boundary, &interior}) {
    for (std::size_t i = 0; i < batch->surfaces.size(); ++i) {
      const SensitivityMatrix differenced =
          finite_difference_sensitivity(batch->surfaces[i], batch->regions[i], 1e-6);
      const Matrix& analytic = batch->closed[i].dx_dcoeff;
      for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
        for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
          const double gap = std::abs(analytic(r, c) - differenced.dx_dcoeff(r, c));
          const double allowed = std::max(1e-6, 1e-5 * std::abs(differenced.dx_dcoeff(r, c)));
          worst_fd = std::max(worst_fd, gap / allowed);
        }
      }
      if (batch == &boundary) {
        const SensitivityMatrix bordered =
            sensitivity_bordered(batch->surfaces[i], batch->points[i]);
        const Matrix& direct = bordered.dx_dcoeff;
        const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
        worst_two_path = std::max(
            worst_two_path, (analytic - direct).cwiseAbs().maxCoeff() / (1e-9 * scale));
      }
    }
  }
  const double elapsed = seconds_since(start);

  Outcome outcome;
  outcome.pass = worst_fd <= 1.0 && worst_two_path <= 1.0 && elapsed < 30.0;
  outcome.detail = "FD tolerance use " + fmt(worst_fd) + "x, two-path tolerance use " +
                   fmt(worst_two_path) + "x, " + fmt(elapsed) + " s";
  return outcome;
}

Outcome block_inverse_identity() {
  NoiseStream rng(4004, 0);
  double worst = 0.0;
  int accepted = 0;
  while (accepted < 1000) {
    const int n = 1 + static_cast<int>(rng.next_bits() % 5);
    const Matrix basis = oracle::random_orthogonal(rng, n);
    Vector eigenvalues(n);
    for (int i = 0; i < n; ++i) {
      const double magnitude = 0.5 + 2.5 * rng.uniform();
      eigenvalues(i) = rng.uniform() < 0.5 ? -magnitude : magnitude;
    }
    Matrix hessian = basis * eigenvalues.asDiagonal() * basis.transpose();
    hessian = 0.5 * (hessian + hessian.transpose()).eval();
    Vector border(n);
    for (int i = 0; i < n; ++i) border(i) = rng.gaussian();
    if (border.norm() < 0.1) continue;
    if (std::abs(border.dot(hessian.fullPivLu().solve(border))) < 1e-3) continue;

    Matrix assembled(n + 1, n + 1);
    assembled.topLeftCorner(n, n) = hessian;
    assembled.topRightCorner(n, 1) = border;
    assembled.bottomLeftCorner(1, n) = border.transpose();
    assembled(n, n) = 0.0;

    const Matrix via_formula = bordered_inverse(hessian, border);
    const Matrix direct = assembled.fullPivLu().inverse();
    worst = std::max(worst, (via_formula - direct).norm() / direct.norm());
    ++accepted;
  }

  Outcome outcome;
  outcome.pass = worst <= 1e-10;
  outcome.detail = "worst Frobenius relative error " + fmt(worst);
  return outcome;
}

Outcome tangency_invariant() {
  const SensitivityBatch boundary = generate_batch(true, 50);
  double worst = 0.0;
  for (std::size_t i = 0; i < boundary.surfaces.size(); ++i) {
    const Matrix& jacobian = boundary.closed[i].dx_dcoeff;
    const double tangency = (boundary.points[i].x.transpose() * jacobian).norm();
    // One-factor optima are pinned at +-radius and their sensitivity is an
    // exact zero; compare rounding noise against a machine-epsilon floor
    // instead of against the zero norm.
    const double floor = 1e-14 * boundary.points[i].x.norm() *
                         (1.0 + design_gradient(boundary.points[i].x).norm());
    worst = std::max(worst, tangency / (1e-10 * jacobian.norm() + floor));
  }

  Outcome outcome;
  outcome.pass = worst <= 1.0;
  outcome.detail = "worst tangency tolerance use " + fmt(worst) + "x";
  return outcome;
}

struct StudySetup {
  SecondOrderSurface truth;
  Region region{2.0};
  Matrix points = oracle::ccd_points();

  StudySetup() { truth = unpack(kReferenceCoefficients, 2); }

  Matrix delta_covariance(double sigma) const {
    const DesignFactorization factorization(points);
    const CriticalPoint point = solve(truth, region);
    const SensitivityMatrix jacobian = sensitivity(truth, point);
    return critical_point_covariance(jacobian,
                                     (sigma * sigma) * factorization.xtx_inverse());
  }
};

Outcome monte_carlo_normality() {
  const auto start = Clock::now();
  const StudySetup setup;
  const double sigma = 0.05;
  const MonteCarloStudy study =
      monte_carlo_study(setup.truth, setup.region, setup.points, sigma, 2000, 42, 0.95);
  const Matrix reference = setup.delta_covariance(sigma);

  const double frobenius = (study.empirical_cov - reference).norm() / reference.norm();
  const double flip_rate = static_cast<double>(study.status_flips) / study.replications;
  bool coverage_in_band = true;
  std::string coverage_text;
  for (int k = 0; k < study.coverage.size(); ++k) {
    coverage_in_band = coverage_in_band && study.coverage(k) >= 0.93 &&
                       study.coverage(k) <= 0.97;
    coverage_text += (k ? "/" : "") + fmt(study.coverage(k));
  }
  const double elapsed = seconds_since(start);

  Outcome outcome;
  outcome.pass = frobenius <= 0.15 && coverage_in_band && flip_rate < 0.01 && elapsed < 60.0;
  outcome.detail = "covariance error " + fmt(frobenius) + " (<=0.15), coverage " +
                   coverage_text + " (band [0.93,0.97]), flips " + fmt(flip_rate * 100) +
                   "%, " + fmt(elapsed) + " s";
  return outcome;
}

Outcome sigma_scaling() {
  const StudySetup setup;
  const Matrix reference_low = setup.delta_covariance(0.05);
  const Matrix reference_high = setup.delta_covariance(0.10);
  const double analytic_gap =
      (reference_high - 4.0 * reference_low).cwiseAbs().maxCoeff() /
      reference_low.cwiseAbs().maxCoeff();

  const MonteCarloStudy low =
      monte_carlo_study(setup.truth, setup.region, setup.points, 0.05, 2000, 42, 0.95);
  const MonteCarloStudy high =
      monte_carlo_study(setup.truth, setup.region, setup.points, 0.10, 2000, 42, 0.95);
  const double empirical_ratio = high.empirical_cov.norm() / low.empirical_cov.norm();

  Outcome outcome;
  outcome.pass = analytic_gap <= 1e-10 && empirical_ratio >= 3.0 && empirical_ratio <= 5.0;
  outcome.detail = "analytic scaling gap " + fmt(analytic_gap) + ", empirical ratio " +
                   fmt(empirical_ratio) + " (target 4 +- 25%)";
  return outcome;
}

Outcome cli_determinism() {
  const auto dir = subprocess::fresh_dir("rsm-acceptance");
  const std::string cli = RSM_CLI_PATH;

  NoiseStream rng(5005, 0);
  Dataset data;
  data.points = oracle::ccd_points();
  data.response = Vector(data.points.rows());
  const SecondOrderSurface truth = unpack(kReferenceCoefficients, 2);
  for (int r = 0; r < data.points.rows(); ++r) {
    data.response(r) =
        predict(truth, data.points.row(r).transpose()) + 0.05 * rng.gaussian();
  }
  subprocess::spit(dir / "data.csv", dataset_csv(data));
  subprocess::spit(dir / "truth.json", R"({"n": 2, "beta": [0, -2, 0, 1, 1, 0]})");

  const std::string simulate = cli + " simulate --truth " + (dir / "truth.json").string() +
                               " --design " + (dir / "data.csv").string() +
                               " --radius 2 --sigma 0.05 --reps 500 --seed 42";
  const auto simulate_a = subprocess::run(simulate + " --out " + (dir / "sim-a.json").string(), dir);
  const auto simulate_b = subprocess::run(simulate + " --out " + (dir / "sim-b.json").string(), dir);

  const std::string analyze = cli + " analyze --data " + (dir / "data.csv").string() +
                              " --radius 0.5 --level 0.95 --fd-check";
  const auto analyze_a = subprocess::run(analyze + " --out " + (dir / "an-a.json").string(), dir);
  const auto analyze_b = subprocess::run(analyze + " --out " + (dir / "an-b.json").string(), dir);

  const std::string sim_a = subprocess::slurp(dir / "sim-a.json");
  const std::string sim_b = subprocess::slurp(dir / "sim-b.json");
  const std::string an_a = subprocess::slurp(dir / "an-a.json");
  const std::string an_b = subprocess::slurp(dir / "an-b.json");
  std::filesystem::remove_all(dir);

  Outcome outcome;
  outcome.pass = simulate_a.exit_code == 0 && simulate_b.exit_code == 0 &&
                 analyze_a.exit_code == 0 && analyze_b.exit_code == 0 && !sim_a.empty() &&
                 sim_a == sim_b && !an_a.empty() && an_a == an_b;
  outcome.detail = std::string("simulate runs ") +
                   (sim_a == sim_b && !sim_a.empty() ? "byte-identical" : "differ") +
                   ", analyze runs " +
                   (an_a == an_b && !an_a.empty() ? "byte-identical" : "differ");
  return outcome;
}

Outcome noiseless_recovery() {
  NoiseStream rng(6006, 0);
  Vector truth(6);
  for (int i = 0; i < 6; ++i) truth(i) = rng.gaussian();
  truth(3) = 1.0 + rng.uniform();  // keep the quadratic block convex
  truth(4) = 1.0 + rng.uniform();
  truth(5) = 0.1 * rng.gaussian();

  Dataset data;
  data.points = oracle::ccd_points();
  data.response = Vector(data.points.rows());
  const SecondOrderSurface surface = unpack(truth, 2);
  for (int r = 0; r < data.points.rows(); ++r) {
    data.response(r) = predict(surface, data.points.row(r).transpose());
  }

  const FitResult fitted = fit(data);
  const double coefficient_error = (fitted.coefficients - truth).cwiseAbs().maxCoeff();

  const std::string report = analyze_report(data, Region{2.0}, 0.95, false, 1e-6);
  const nlohmann::json parsed = nlohmann::json::parse(report);
  const double sigma2 = parsed["fit"]["sigma2_hat"].get<double>();
  double widest = 0.0;
  for (const auto& interval : parsed["asymptotics"]["confidence_intervals"]) {
    widest = std::max(widest, interval[1].get<double>() - interval[0].get<double>());
  }

  Outcome outcome;
  outcome.pass = coefficient_error <= 1e-9 && sigma2 <= 1e-16 && widest <= 1e-12;
  outcome.detail = "coefficient error " + fmt(coefficient_error) + ", sigma2 " + fmt(sigma2) +
                   ", widest interval " + fmt(widest);
  return outcome;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"analytic boundary instance solves exactly and fast", analytic_boundary_instance},
      {"analytic interior instance with zero intercept sensitivity", analytic_interior_instance},
      {"design gradient identity and finite-difference oracle", design_gradient_oracle},
      {"sensitivities match finite differences and the bordered solve", sensitivity_oracle},
      {"block inverse identity on random bordered systems", block_inverse_identity},
      {"boundary sensitivities are tangent to the sphere", tangency_invariant},
      {"Monte Carlo covariance, coverage and status stability", monte_carlo_normality},
      {"covariance scales with the noise variance", sigma_scaling},
      {"CLI simulate and analyze are byte-deterministic", cli_determinism},
      {"noiseless data gives exact recovery and degenerate intervals", noiseless_recovery},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& err) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + err.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %zu: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), outcome.detail.c_str());
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  } else {
    std::printf("all %zu criteria passed\n", criteria.size());
  }
  return failures == 0 ? 0 : 1;
}
