#pragma once

#include "rsmkit/optimizer.hpp"
#include "rsmkit/surface.hpp"

namespace rsm {

/// n x p matrix whose column k is the gradient of the k-th design-row
/// monomial. For any packed coefficient vector b it satisfies
/// design_gradient(x) * b = linear + 2 Q x, the gradient of the surface.
Matrix design_gradient(const Vector& x);

/// Saddle system of the active-constraint first-order conditions.
struct BorderedSystem {
  Matrix hessian;              // 2 (Q + multiplier I), n x n
  Vector constraint_gradient;  // 2 x, length n
  Matrix rhs;                  // (design_gradient(x); 0), (n+1) x p
};

BorderedSystem bordered_system(const SecondOrderSurface& surface, const CriticalPoint& point);

/// (n+1) x (n+1) Jacobian [[hessian, q], [q', 0]] at an active-constraint
/// critical point. Rejects interior points and singular systems.
Matrix kkt_jacobian(const SecondOrderSurface& surface, const CriticalPoint& point);

/// Inverse of [[P, q], [q', 0]] assembled from the symmetric block
/// identity with Schur scalar q' P^-1 q.
Matrix bordered_inverse(const Matrix& hessian, const Vector& constraint_gradient);

/// -J^-1 rhs, computed both by direct factorization and through the block
/// inverse; disagreement beyond rounding is reported as a singular system.
/// Rows 0..n-1 are dx/db, row n is dmultiplier/db.
Matrix solve_bordered(const BorderedSystem& system);

enum class SensitivityMethod {
  InteriorClosedForm,
  BoundaryClosedForm,
  BorderedSolve,
  FiniteDifference,
};

const char* sensitivity_method_name(SensitivityMethod method);

struct SensitivityMatrix {
  Matrix dx_dcoeff;            // n x p
  Vector dmultiplier_dcoeff;   // length p at boundary points, empty otherwise
  SensitivityMethod method = SensitivityMethod::InteriorClosedForm;
};

/// Closed form -1/2 Q^-1 design_gradient(x) at an interior optimum.
SensitivityMatrix sensitivity_interior(const SecondOrderSurface& surface,
                                       const CriticalPoint& point);

/// Closed form G^-1 (x x' G^-1 / (x' G^-1 x) - I) design_gradient(x) with
/// G = 2 (Q + multiplier I) at a boundary optimum; cross-checked against
/// the bordered solve.
SensitivityMatrix sensitivity_boundary(const SecondOrderSurface& surface,
                                       const CriticalPoint& point);

/// Boundary sensitivities straight from the bordered solve.
SensitivityMatrix sensitivity_bordered(const SecondOrderSurface& surface,
                                       const CriticalPoint& point);

/// Dispatches to the closed form matching the point's status.
SensitivityMatrix sensitivity(const SecondOrderSurface& surface, const CriticalPoint& point);

/// Central differences of the full solver in every coefficient direction;
/// step k is scaled as step * (1 + |coefficient_k|). A perturbation that
/// changes the interior/boundary status is reported, never averaged over.
SensitivityMatrix finite_difference_sensitivity(const SecondOrderSurface& surface,
                                                const Region& region, double step,
                                                bool allow_nonconvex = false);

}  // namespace rsm
