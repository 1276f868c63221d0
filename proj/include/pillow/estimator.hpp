#pragma once

// Monte Carlo estimators of the non-crossing probability
//     ψ(u;h) = P{B₀(s,t) + h(s,t) ≤ u(s,t) at every grid node}
// and related events. All estimators are deterministic functions of their
// inputs and of McOptions: paths are split into `blocks` contiguous blocks,
// each block reduces in log space, and blocks are merged in index order.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pillow/grid.hpp"
#include "pillow/majorant.hpp"

namespace pillow {

struct McOptions {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 0;
    std::uint32_t stream_id = 0;
    int blocks = 64;
    int threads = 0;          ///< 0: hardware concurrency
    bool check_ibp = false;   ///< per-path check of the two stochastic-integral forms
};

struct McEstimate {
    double p_hat = 0.0;
    double log_p_hat = 0.0;    ///< −inf when p_hat == 0
    double std_err = 0.0;      ///< sample std of the per-path contribution / √n_paths
    double log_std_err = 0.0;  ///< delta method: std_err / p_hat
    std::int64_t n_paths = 0;
    int n_grid = 0;
    std::uint64_t seed = 0;
    std::uint32_t stream_id = 0;
    std::pair<double, double> ci95{0.0, 0.0};
    bool weighted = false;
    double ess = 0.0;          ///< effective sample size of the weights that hit the event
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const;
};

/// Fraction of pillow paths with B₀ + h ≤ u at all nodes. Returns an exact 0
/// flagged "deterministic_zero" when h > u at a boundary node (B₀ = 0 there).
McEstimate estimate_direct(const GridFn2D& u, const GridFn2D& h, const McOptions& opts);

/// Importance-sampled ψ(u;h): paths of B₀ are tested against B₀ + (h − shift) ≤ u
/// and weighted by exp(⟨shift, B₀⟩ − ‖shift‖²/2), where ⟨shift, B₀⟩ is the discrete
/// stochastic integral Σ_cells shift'' · ΔB₀. The grid identity is exact, so the
/// estimator is unbiased for the grid probability. Flags "low_ess" when ESS < 50.
McEstimate estimate_cm(const GridFn2D& u, const GridFn2D& h, const GridFn2D& shift,
                       const McOptions& opts);

/// Mean of the change-of-measure weight with no event attached (equals 1 in expectation).
McEstimate estimate_cm_weight_mean(const GridFn2D& shift, const McOptions& opts);

/// P{l ≤ B₀ ≤ u at all nodes}. Throws DomainError if l > u somewhere.
McEstimate estimate_band(const GridFn2D& l, const GridFn2D& u, const McOptions& opts);

/// P{l ≤ B₀ ≤ u at the listed nodes only}.
McEstimate estimate_band_on(const GridFn2D& l, const GridFn2D& u,
                            const std::vector<std::pair<int, int>>& nodes, const McOptions& opts);

/// P{max |B₀| < eps} on a grid with n cells per axis.
McEstimate estimate_small_ball(double eps, int n, const McOptions& opts);

using SurfaceFn = std::function<double(double, double)>;

/// Non-crossing probabilities of one continuum configuration (u, h) on nested
/// grids. Paths are drawn on the finest grid and restricted, so every coarse
/// event contains the finer one path by path. Each n must divide max(ns).
std::vector<McEstimate> estimate_refinement(const SurfaceFn& u, const SurfaceFn& h,
                                            const std::vector<int>& ns, const McOptions& opts);

struct SweepRow {
    double gamma = 0.0;
    double log_psi_hat = 0.0;
    double log_std_err = 0.0;
    double rate_hat = 0.0;       ///< −2γ⁻² log ψ̂
    double remainder_hat = 0.0;  ///< log ψ̂ + γ²‖h̲‖²/2 − γ I
    double ess = 0.0;
    std::vector<std::string> flags;
    std::string error;           ///< set when this row failed; other fields are NaN
};

struct SweepResult {
    double norm_h_low = 0.0;   ///< ‖h̲‖
    double stieltjes_I = 0.0;  ///< ∫ u dh̲''
    std::vector<std::pair<int, int>> contact_set;
    McEstimate contact_estimate;  ///< P{B₀ ≤ u on the contact set}
    std::vector<SweepRow> rows;
};

/// log ψ(u;γh) for each γ, importance sampled with shift γh̲.
SweepResult gamma_sweep(const GridFn2D& u, const GridFn2D& h, const std::vector<double>& gammas,
                        const McOptions& opts, const SolverOptions& solver = {});

}  // namespace pillow
