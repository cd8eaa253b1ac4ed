#pragma once

#include "rsmkit/surface.hpp"

namespace rsm {

/// Spherical experimental region ||x|| <= radius.
struct Region {
  double radius = 1.0;
};

enum class PointStatus { Interior, Boundary };

const char* point_status_name(PointStatus status);

struct ConvexityReport {
  double min_eigenvalue = 0.0;
  double spectral_norm = 0.0;
  bool strictly_convex = false;
};

struct KktResiduals {
  double stationarity = 0.0;     // ||linear + 2 (Q + multiplier I) x||
  double primal = 0.0;           // max(0, ||x||^2 - radius^2)
  double complementarity = 0.0;  // |multiplier (||x||^2 - radius^2)|
  double dual = 0.0;             // max(0, -multiplier)
  double form_gap = 0.0;         // gap between the two gradient evaluations
};

struct CriticalPoint {
  Vector x;
  double multiplier = 0.0;
  PointStatus status = PointStatus::Interior;
  KktResiduals residuals;
  // True when the surface was not strictly convex and the boundary search
  // ran beyond the convex contract.
  bool extension = false;
  // False when the constraint is active with a (numerically) zero
  // multiplier; downstream sensitivities are not differentiable there.
  bool strict_complementarity = true;
};

ConvexityReport convexity_report(const SecondOrderSurface& surface);

double lagrangian(const SecondOrderSurface& surface, const Vector& x, double multiplier,
                  const Region& region);

/// Unconstrained minimizer -1/2 Q^-1 linear; requires strict convexity.
Vector solve_interior(const SecondOrderSurface& surface);

struct BoundarySolution {
  Vector x;
  double multiplier = 0.0;
};

/// Stationary point with the sphere treated as the active constraint:
/// x(m) = -1/2 (Q + m I)^-1 linear with ||x(m)|| = radius, searching
/// m > max(0, -min_eig(Q)). When the surface is strictly convex and its
/// unconstrained minimizer already lies inside the region, returns that
/// minimizer with multiplier 0 (the constraint is inactive).
BoundarySolution solve_boundary(const SecondOrderSurface& surface, const Region& region);

/// Global minimizer of the fitted surface over the region, with KKT
/// residuals. Surfaces that are not strictly convex are rejected unless
/// allow_nonconvex is set, in which case the boundary search runs on the
/// shifted spectrum and the result is flagged as an extension.
CriticalPoint solve(const SecondOrderSurface& surface, const Region& region,
                    bool allow_nonconvex = false);

/// Residuals of the first-order conditions at an arbitrary candidate
/// point. Both algebraic forms of the gradient are evaluated; a gap
/// between them beyond rounding is an internal error.
KktResiduals kkt_certificate(const SecondOrderSurface& surface, const Region& region,
                             const CriticalPoint& point);

}  // namespace rsm
