#include "rsmkit/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "rsmkit/sensitivity.hpp"

namespace rsm {

namespace {

constexpr int kSecularMaxIterations = 100;
constexpr double kSecularTolerance = 1e-12;  // on | ||x|| - radius | / radius
constexpr double kStrictComplementarityFloor = 1e-10;

struct Spectrum {
  Vector eigenvalues;  // ascending
  Matrix vectors;
  double norm = 0.0;  // spectral norm of Q

  double positive_definite_tolerance() const { return 1e-12 * std::max(1.0, norm); }
  bool positive_definite() const { return eigenvalues(0) > positive_definite_tolerance(); }
};

Spectrum decompose(const Matrix& quadratic) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(quadratic);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Internal, "eigendecomposition of the quadratic block failed");
  }
  Spectrum spectrum;
  spectrum.eigenvalues = solver.eigenvalues();
  spectrum.vectors = solver.eigenvectors();
  spectrum.norm = spectrum.eigenvalues.cwiseAbs().maxCoeff();
  return spectrum;
}

void validate(const SecondOrderSurface& surface, const Region& region) {
  if (surface.factors() < 1) {
    throw Error(ErrorCode::InvalidArgument, "surface has no factors");
  }
  if (!surface.linear.allFinite() || !surface.quadratic.allFinite() ||
      !std::isfinite(surface.intercept)) {
    throw Error(ErrorCode::InvalidArgument, "surface coefficients contain a non-finite entry");
  }
  if (!(region.radius > 0.0) || !std::isfinite(region.radius)) {
    throw Error(ErrorCode::InvalidArgument, "region radius must be positive and finite");
  }
}

// ||x(m)|| in the eigenbasis: x(m) = -1/2 (Q + m I)^-1 linear.
double shifted_norm(const Vector& rotated_linear, const Vector& eigenvalues, double m) {
  double sum = 0.0;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    const double denom = eigenvalues(i) + m;
    const double term = rotated_linear(i) / denom;
    sum += term * term;
  }
  return 0.5 * std::sqrt(sum);
}

// d/dm of sum b_i^2 / (w_i + m)^2  =  -2 sum b_i^2 / (w_i + m)^3.
double shifted_norm_cubic_sum(const Vector& rotated_linear, const Vector& eigenvalues,
                              double m) {
  double sum = 0.0;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    const double denom = eigenvalues(i) + m;
    const double term = rotated_linear(i) * rotated_linear(i);
    sum += term / (denom * denom * denom);
  }
  return sum;
}

Vector reconstruct(const Spectrum& spectrum, const Vector& rotated_linear, double m) {
  Vector scaled = -0.5 * rotated_linear.array() / (spectrum.eigenvalues.array() + m);
  return spectrum.vectors * scaled.matrix();
}

BoundarySolution solve_boundary_impl(const SecondOrderSurface& surface, const Region& region,
                                     const Spectrum& spectrum) {
  const double radius = region.radius;
  const Vector rotated = spectrum.vectors.transpose() * surface.linear;
  const double min_eig = spectrum.eigenvalues(0);
  const double floor = std::max(0.0, -min_eig);

  if (surface.linear.norm() == 0.0) {
    if (spectrum.positive_definite()) {
      return {Vector::Zero(surface.factors()), 0.0};  // inactive constraint
    }
    throw Error(ErrorCode::HardCase,
                "no linear term and the quadratic block is not positive definite");
  }

  if (spectrum.positive_definite() && shifted_norm(rotated, spectrum.eigenvalues, 0.0) <= radius) {
    // Unconstrained minimizer inside the region (or on it: multiplier 0).
    return {reconstruct(spectrum, rotated, 0.0), 0.0};
  }

  if (!spectrum.positive_definite()) {
    // Root exists iff the shifted norm exceeds the radius somewhere right
    // of the floor. With the linear term orthogonal to the minimal
    // eigenspace the norm stays finite there; this is the hard case.
    const double cluster_tol = 1e-10 * std::max(1.0, spectrum.norm);
    double min_space = 0.0;
    double limit = 0.0;
    for (int i = 0; i < spectrum.eigenvalues.size(); ++i) {
      if (spectrum.eigenvalues(i) <= min_eig + cluster_tol) {
        min_space += rotated(i) * rotated(i);
      } else {
        const double term = rotated(i) / (spectrum.eigenvalues(i) - min_eig);
        limit += term * term;
      }
    }
    const double orth_tol = 1e-8 * surface.linear.norm();
    if (min_space <= orth_tol * orth_tol && 0.5 * std::sqrt(limit) < radius) {
      throw Error(ErrorCode::HardCase,
                  "linear term is orthogonal to the minimal eigenspace and the active "
                  "constraint cannot be reached");
    }
  }

  // Bracket: the norm decreases strictly in the multiplier, from >= radius
  // (possibly infinite at the floor) down to zero.
  double lo = floor;
  double gap = std::max(1.0, surface.linear.norm() / (2.0 * radius));
  double hi = floor + gap;
  int growth = 0;
  while (shifted_norm(rotated, spectrum.eigenvalues, hi) >= radius) {
    gap *= 2.0;
    hi = floor + gap;
    if (++growth > 200) {
      throw Error(ErrorCode::Internal, "failed to bracket the boundary multiplier");
    }
  }

  // Safeguarded Newton on the reciprocal norm, which is close to linear in
  // the multiplier; bisection keeps the iterate inside the bracket.
  double m = hi;
  for (int iter = 0; iter < kSecularMaxIterations; ++iter) {
    const double norm = shifted_norm(rotated, spectrum.eigenvalues, m);
    if (std::abs(norm - radius) <= kSecularTolerance * radius) break;
    if (norm > radius) {
      lo = m;
    } else {
      hi = m;
    }
    const double reciprocal_gap = 1.0 / norm - 1.0 / radius;
    const double derivative =
        0.25 * shifted_norm_cubic_sum(rotated, spectrum.eigenvalues, m) / (norm * norm * norm);
    double next = m - reciprocal_gap / derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    m = next;
  }

  Vector x = reconstruct(spectrum, rotated, m);

  // Polish against the unrotated matrix so the returned point satisfies
  // the radius equation independently of eigendecomposition error.
  for (int polish = 0; polish < 3; ++polish) {
    const double norm = x.norm();
    if (std::abs(norm - radius) <= kSecularTolerance * radius) break;
    Matrix shifted = surface.quadratic + m * Matrix::Identity(surface.factors(), surface.factors());
    const Vector u = shifted.ldlt().solve(x);
    const double derivative = -x.dot(u) / norm;
    if (!(derivative < 0.0) || !std::isfinite(derivative)) break;
    m -= (norm - radius) / derivative;
    if (m < floor) m = std::nextafter(floor, std::numeric_limits<double>::infinity());
    x = reconstruct(spectrum, rotated, m);
  }

  return {x, m};
}

KktResiduals compute_residuals(const SecondOrderSurface& surface, const Region& region,
                               const Vector& x, double multiplier) {
  const Vector gradient =
      surface.linear + 2.0 * (surface.quadratic * x + multiplier * x);
  const Vector gradient_via_design =
      design_gradient(x) * pack(surface) + 2.0 * multiplier * x;

  KktResiduals residuals;
  residuals.stationarity = gradient.norm();
  const double slack = x.squaredNorm() - region.radius * region.radius;
  residuals.primal = std::max(0.0, slack);
  residuals.complementarity = std::abs(multiplier * slack);
  residuals.dual = std::max(0.0, -multiplier);
  residuals.form_gap = (gradient - gradient_via_design).norm();

  const double scale =
      std::max({1.0, surface.linear.norm(),
                2.0 * (surface.quadratic * x + multiplier * x).norm()});
  if (residuals.form_gap > 1e-12 * scale) {
    throw Error(ErrorCode::Internal,
                "the two gradient evaluations disagree beyond rounding (gap " +
                    std::to_string(residuals.form_gap) + ")");
  }
  return residuals;
}

}  // namespace

const char* point_status_name(PointStatus status) {
  return status == PointStatus::Interior ? "Interior" : "Boundary";
}

ConvexityReport convexity_report(const SecondOrderSurface& surface) {
  const Spectrum spectrum = decompose(surface.quadratic);
  ConvexityReport report;
  report.min_eigenvalue = spectrum.eigenvalues(0);
  report.spectral_norm = spectrum.norm;
  report.strictly_convex = spectrum.eigenvalues(0) > 1e-12 * spectrum.norm;
  return report;
}

double lagrangian(const SecondOrderSurface& surface, const Vector& x, double multiplier,
                  const Region& region) {
  return predict(surface, x) + multiplier * (x.squaredNorm() - region.radius * region.radius);
}

Vector solve_interior(const SecondOrderSurface& surface) {
  const Spectrum spectrum = decompose(surface.quadratic);
  if (!spectrum.positive_definite()) {
    throw Error(ErrorCode::NotConvex,
                "quadratic block is not positive definite (min eigenvalue " +
                    std::to_string(spectrum.eigenvalues(0)) + ")");
  }
  Vector x = reconstruct(spectrum, spectrum.vectors.transpose() * surface.linear, 0.0);
  // One refinement step keeps the gradient residual at rounding level.
  const Vector residual = surface.linear + 2.0 * surface.quadratic * x;
  x -= 0.5 * surface.quadratic.ldlt().solve(residual);
  return x;
}

BoundarySolution solve_boundary(const SecondOrderSurface& surface, const Region& region) {
  validate(surface, region);
  return solve_boundary_impl(surface, region, decompose(surface.quadratic));
}

CriticalPoint solve(const SecondOrderSurface& surface, const Region& region,
                    bool allow_nonconvex) {
  validate(surface, region);
  const Spectrum spectrum = decompose(surface.quadratic);

  CriticalPoint point;
  if (spectrum.positive_definite()) {
    const Vector unconstrained = solve_interior(surface);
    if (unconstrained.norm() < region.radius) {
      point.x = unconstrained;
      point.multiplier = 0.0;
      point.status = PointStatus::Interior;
    } else {
      const BoundarySolution boundary = solve_boundary_impl(surface, region, spectrum);
      point.x = boundary.x;
      point.multiplier = boundary.multiplier;
      point.status = PointStatus::Boundary;
    }
  } else {
    if (!allow_nonconvex) {
      throw Error(ErrorCode::NotConvex,
                  "quadratic block is not positive definite (min eigenvalue " +
                      std::to_string(spectrum.eigenvalues(0)) +
                      "); pass allow_nonconvex to search the boundary anyway");
    }
    const BoundarySolution boundary = solve_boundary_impl(surface, region, spectrum);
    point.x = boundary.x;
    point.multiplier = boundary.multiplier;
    point.status = PointStatus::Boundary;
    point.extension = true;
  }

  point.strict_complementarity = point.status == PointStatus::Interior ||
                                 point.multiplier > kStrictComplementarityFloor;
  point.residuals = compute_residuals(surface, region, point.x, point.multiplier);
  return point;
}

KktResiduals kkt_certificate(const SecondOrderSurface& surface, const Region& region,
                             const CriticalPoint& point) {
  if (point.x.size() != surface.factors()) {
    throw Error(ErrorCode::InvalidArgument, "critical point dimension does not match surface");
  }
  return compute_residuals(surface, region, point.x, point.multiplier);
}

}  // namespace rsm
