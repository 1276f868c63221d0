#pragma once

// Analytic bounds on ψ(u;h) and the report that reconciles them with Monte
// Carlo estimates.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pillow/estimator.hpp"
#include "pillow/grid.hpp"
#include "pillow/majorant.hpp"

namespace pillow {

struct ShiftBounds {
    double theta = 0.0;  ///< Φ⁻¹(ψ(u;0))
    double lower = 0.0;  ///< Φ(θ − ‖h̲‖)
    double upper = 0.0;  ///< Φ(θ + ‖h̄‖)
};

/// Gaussian shift bounds. psi0 must lie strictly inside (0,1).
ShiftBounds shift_bounds(double psi0, double norm_low, double norm_up);

struct DiffBounds {
    double lower_delta = 0.0;  ///< −‖h̲‖/√(2π)
    double upper_delta = 0.0;  ///<  ‖h̄‖/√(2π)
};

/// Bounds on ψ(u;h) − ψ(u;0).
DiffBounds diff_bounds(double norm_low, double norm_up);

/// |ψ(u;h) − ψ(u;0)| ≤ 2Φ(‖h‖/2) − 1, the coarser bound in terms of ‖h‖ itself.
double coarse_diff_bound(double norm_h);

struct ExpBound {
    double value = 0.0;
    double log_value = 0.0;
    double stieltjes = 0.0;   ///< ∫ v dh̲'' for v = u (upper) or l (lower)
    double edge_mass = 0.0;   ///< |contribution| of boundary-node atoms
    std::vector<std::string> flags;
};

/// ψ(u;h) ≤ ψ(u;h−h̲)·exp(−‖h̲‖²/2 + ∫u dh̲''). Pass psi_residual = 1 for the
/// relaxed form. Flags "edge_mass" when boundary atoms carry > 1% of the integral.
ExpBound exp_upper_bound(const GridFn2D& u, const GridFn2D& h, const ProjectionResult& pr,
                         double psi_residual);

/// ψ(u;h) ≥ P{l ≤ B₀ ≤ u}·exp(−‖h̲‖²/2 + ∫l dh̲'').
ExpBound exp_lower_bound(const GridFn2D& l, const GridFn2D& u, const ProjectionResult& pr,
                         double band);

struct ConstantBoundaryBound {
    double corner = 0.0;  ///< h̲''(1,1) − h̲''(1,0) − h̲''(0,1) + h̲''(0,0)
    double value = 0.0;
    double log_value = 0.0;
};

/// Specialisation of exp_upper_bound to u ≡ c. Throws std::logic_error if the
/// corner combination differs from the total discrete measure mass.
ConstantBoundaryBound constant_boundary_upper(double c, const ProjectionResult& pr,
                                              double psi_residual = 1.0);

struct Candidate {
    std::string name;
    GridFn2D h;
};

struct Psi0Bound {
    double value = 1.0;
    std::size_t argmin = 0;
    std::string argmin_name;
    std::vector<double> values;  ///< per candidate; NaN where ‖h̲‖ = 0
};

/// ψ(u;0) ≤ min over candidates of Φ(∫u dh̲'' / ‖h̲‖). Ties go to the first index.
Psi0Bound psi0_upper_bound(const GridFn2D& u, const std::vector<Candidate>& candidates,
                           const SolverOptions& solver = {});

/// Products of tents with apex (a,b) on a 0.1 lattice plus the parabola product.
std::vector<Candidate> builtin_candidate_family(int n);

/// The alternate closed-form display inf Φ(c²((h'(1) − h'(0)) / ∫h'²)²) over 1D
/// concave functions h. Reported next to psi0_upper_bound, not used as a bound.
double product_display_psi0(double c, const std::vector<GridFn1D>& family);

struct ProductBounds {
    double norm2 = 0.0;               ///< ‖h̃₁‖²‖h̃₂‖²
    double upper_integral = 0.0;      ///< ∏ ∫uᵢ d(−h̃ᵢ')
    double lower_integral = 0.0;      ///< ∏ ∫lᵢ d(−h̃ᵢ')
    double log_upper = 0.0;
    double log_lower = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double upper_exponent_2d = 0.0;   ///< same exponent from the assembled 2D objects
    double cross_check_rel_err = 0.0;
    GridFn2D h_tilde{2};
};

/// Bounds for product trends and boundaries. psi_residual estimates ψ(u; h − h̃)
/// and band estimates P{l₁l₂ ≤ B₀ ≤ u₁u₂}; pass 1 for the relaxed forms.
ProductBounds product_bounds(const GridFn1D& u1, const GridFn1D& u2, const GridFn1D& l1,
                             const GridFn1D& l2, const GridFn1D& h1, const GridFn1D& h2,
                             double psi_residual = 1.0, double band = 1.0);

/// Leading-order log ψ(u₁×u₂; γ h₁×h₂) = −γ²/2·∏‖h̃ᵢ‖² + γ·∏∫uᵢ d(−h̃ᵢ').
/// Requires min uᵢ > 0.
double product_asymptote(const GridFn1D& u1, const GridFn1D& u2, const GridFn1D& h1,
                         const GridFn1D& h2, double gamma);

struct ReportCheck {
    std::string name;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  ///< 3 × combined standard error
};

struct BoundReport {
    McEstimate psi0_hat;
    double theta = 0.0;
    std::pair<double, double> theta_ci95{0.0, 0.0};
    double norm_h = 0.0;
    double norm_h_low = 0.0;
    double norm_h_up = 0.0;
    double shift_lower = 0.0, shift_upper = 0.0;
    double diff_lower = 0.0, diff_upper = 0.0;
    double coarse_diff = 0.0;
    double exp_upper = 0.0, exp_lower = 0.0;
    double corner_term = 0.0;
    double stieltjes_I = 0.0;        ///< ∫u dh̲''
    double stieltjes_I_lower = 0.0;  ///< ∫l dh̲''
    std::optional<double> constant_upper;  ///< when u is constant
    Psi0Bound psi0_upper;
    McEstimate psi_residual;  ///< ψ(u; h − h̲)
    McEstimate band;          ///< P{l ≤ B₀ ≤ u}
    std::optional<McEstimate> psi_hat;  ///< ψ(u;h), only when reconciling
    std::vector<ReportCheck> checks;
    std::vector<std::string> flags;
    bool relaxed = false;

    bool all_pass() const;
};

struct BoundConfig {
    McOptions mc;
    SolverOptions solver;
    bool relaxed = false;     ///< substitute 1 for ψ(u; h − h̲)
    bool reconcile = false;   ///< also estimate ψ(u;h) and run the ordering checks
};

/// Evaluates every bound for (u, h, l). Estimates use independent streams
/// mc.stream_id + {0: ψ(u;0), 1: ψ(u;h), 2: ψ(u;h−h̲), 3: band}.
BoundReport bound_report(const GridFn2D& u, const GridFn2D& h, const GridFn2D& l,
                         const BoundConfig& cfg);

}  // namespace pillow
