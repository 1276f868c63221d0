#pragma once

// Minimal-norm majorants.
//
// project_polar_cone solves  min ‖g‖  over g ∈ H₂⁰ with g ≥ h at every node,
// i.e. the box-constrained QP  min ½ gᵀQg, g ≥ h  on the interior nodes with
// Q = L ⊗ L, L = n·tridiag(−1, 2, −1). The KKT multipliers λ = Qg are exactly
// the node atoms of the measure generated by g'', so dual feasibility is the
// positivity of that measure.

#include <string>
#include <utility>
#include <vector>

#include "pillow/grid.hpp"

namespace pillow {

struct MajorantResult1D {
    GridFn1D h_tilde;
    double norm = 0.0;
    std::vector<int> knots;  // hull vertices, left to right; collinear points kept
};

/// Least concave majorant (upper convex hull) of a function vanishing at both ends.
MajorantResult1D least_concave_majorant(const GridFn1D& h);

enum class QpMethod {
    Auto,                ///< primal-dual active set, primal active set if it cycles
    PrimalDualActiveSet,
    PrimalActiveSet,
};

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 20000;
    QpMethod method = QpMethod::Auto;
};

struct ProjectionResult {
    GridFn2D h_bar;        ///< minimal-norm majorant (or minorant for project_W)
    GridFn2D v_part;       ///< h − h_bar
    double norm = 0.0;     ///< ‖h_bar‖
    GridFn2D multipliers;  ///< KKT multipliers, zero on the boundary
    std::vector<std::pair<int, int>> contact_set;  ///< nodes with |h_bar − h| ≤ tol
    int iterations = 0;
    double residual = 0.0;  ///< max KKT violation
    std::string method;
};

/// Projection onto the polar cone of V = {g ≤ 0}: the unique minimiser of ‖g‖ over g ≥ h.
ProjectionResult project_polar_cone(const GridFn2D& h, const SolverOptions& opts = {});

/// Mirror image: minimiser of ‖g‖ over g ≤ h, computed as −project_polar_cone(−h).
/// multipliers are the (nonnegative) multipliers of the constraints g ≤ h.
ProjectionResult project_W(const GridFn2D& h, const SolverOptions& opts = {});

/// Row/column concave-majorant envelope of max(h, 0); always feasible for g ≥ h.
GridFn2D feasible_start(const GridFn2D& h);

/// h̃₁ ⊗ h̃₂ with h̃ᵢ the least concave majorant of hᵢ. Throws DomainError
/// naming a node where h̃₁⊗h̃₂ < h₁⊗h₂ (the product shortcut does not apply).
GridFn2D product_majorant(const GridFn1D& h1, const GridFn1D& h2);

struct ProjectionCheck {
    std::string name;
    bool pass = false;
    double residual = 0.0;
};

struct VerificationReport {
    std::vector<ProjectionCheck> checks;
    bool all_pass() const;
    const ProjectionCheck& at(const std::string& name) const;
};

/// Certificate check for a polar-cone projection: feasibility, V-membership of
/// the complement, orthogonality, measure positivity and complementary
/// slackness, each recomputed from pr.h_bar.
VerificationReport verify_projection(const GridFn2D& h, const ProjectionResult& pr,
                                     double tol = 1e-8);

}  // namespace pillow
