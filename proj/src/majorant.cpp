#include "pillow/majorant.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

namespace pillow {

// ---- 1D ---------------------------------------------------------------------

MajorantResult1D least_concave_majorant(const GridFn1D& h) {
    h.require_h0("least_concave_majorant");
    const int n = h.n();

    // Upper hull by monotone chain. A middle point is dropped only when it lies
    // strictly below the chord, so collinear points survive as knots.
    std::vector<int> hull;
    hull.reserve(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
        while (hull.size() >= 2) {
            const int o = hull[hull.size() - 2];
            const int a = hull.back();
            const double ax = a - o, ay = h[a] - h[o];
            const double bx = k - o, by = h[k] - h[o];
            const double cross = ax * by - ay * bx;
            const double scale = std::abs(ax * by) + std::abs(ay * bx);
            if (cross > 1e-12 * scale) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(k);
    }

    GridFn1D tilde(n);
    for (std::size_t q = 0; q + 1 < hull.size(); ++q) {
        const int a = hull[q], b = hull[q + 1];
        tilde[a] = h[a];
        for (int i = a + 1; i < b; ++i)
            tilde[i] = h[a] + (h[b] - h[a]) * static_cast<double>(i - a) / (b - a);
    }
    tilde[n] = h[n];

    MajorantResult1D r{tilde, rkhs_norm1d(tilde), std::move(hull)};
    return r;
}

GridFn2D product_majorant(const GridFn1D& h1, const GridFn1D& h2) {
    require_same_grid(h1.n(), h2.n(), "product_majorant");
    const auto m1 = least_concave_majorant(h1);
    const auto m2 = least_concave_majorant(h2);
    const GridFn2D prod = outer(m1.h_tilde, m2.h_tilde);
    const int n = h1.n();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double target = h1[i] * h2[j];
            if (prod(i, j) < target) {
                std::ostringstream os;
                os.precision(17);
                os << "product_majorant: h̃₁⊗h̃₂ < h₁⊗h₂ at node (" << i << "," << j << "): "
                   << prod(i, j) << " < " << target << "; use project_polar_cone";
                throw DomainError(os.str());
            }
        }
    }
    return prod;
}

GridFn2D feasible_start(const GridFn2D& h) {
    const int n = h.n();
    GridFn2D g = h;
    for (double& v : g.values()) v = std::max(v, 0.0);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (g.on_boundary(i, j)) g(i, j) = 0.0;
        }
    }
    GridFn1D line(n);
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 1; i < n; ++i) {
            for (int j = 0; j <= n; ++j) line[j] = g(i, j);
            const auto m = least_concave_majorant(line);
            for (int j = 0; j <= n; ++j) g(i, j) = std::max(g(i, j), m.h_tilde[j]);
        }
        for (int j = 1; j < n; ++j) {
            for (int i = 0; i <= n; ++i) line[i] = g(i, j);
            const auto m = least_concave_majorant(line);
            for (int i = 0; i <= n; ++i) g(i, j) = std::max(g(i, j), m.h_tilde[i]);
        }
    }
    return g;
}

// ---- 2D QP ------------------------------------------------------------------

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Interior-node QP  min ½ xᵀQx  s.t. x ≥ b,  Q = L⊗L.
class BoxQp {
public:
    BoxQp(const GridFn2D& h, const SolverOptions& opts) : n_(h.n()), m_(h.n() - 1), opts_(opts) {
        lower_.resize(m_ * m_);
        double hs = 0.0;
        for (int i = 1; i < n_; ++i)
            for (int j = 1; j < n_; ++j) {
                lower_[flat(i, j)] = h(i, j);
                hs = std::max(hs, std::abs(h(i, j)));
            }
        scale_ = std::max(hs, 1e-300);
        gap_tol_ = 1e-12 * scale_;
        mult_tol_ = 4.0 * n_ * n_ * gap_tol_;
    }

    int size() const { return m_ * m_; }
    const Vec& lower() const { return lower_; }

    /// y = Q x via the 3x3 stencil of L⊗L.
    Vec apply(const Vec& x) const {
        Vec y(size());
        const double nn = static_cast<double>(n_) * n_;
        for (int a = 0; a < m_; ++a) {
            for (int b = 0; b < m_; ++b) {
                double acc = 0.0;
                for (int da = -1; da <= 1; ++da) {
                    const int aa = a + da;
                    if (aa < 0 || aa >= m_) continue;
                    for (int db = -1; db <= 1; ++db) {
                        const int bb = b + db;
                        if (bb < 0 || bb >= m_) continue;
                        acc += coef(da) * coef(db) * x[aa * m_ + bb];
                    }
                }
                y[a * m_ + b] = nn * acc;
            }
        }
        return y;
    }

    /// Minimiser with x_A = b_A fixed and x free elsewhere.
    Vec solve_with_fixed(const std::vector<char>& fixed) const {
        const int N = size();
        Vec x = Vec::Zero(N);
        std::vector<int> free_idx;
        std::vector<int> pos(static_cast<std::size_t>(N), -1);
        for (int p = 0; p < N; ++p) {
            if (fixed[static_cast<std::size_t>(p)]) {
                x[p] = lower_[p];
            } else {
                pos[static_cast<std::size_t>(p)] = static_cast<int>(free_idx.size());
                free_idx.push_back(p);
            }
        }
        if (free_idx.empty()) return x;

        const int F = static_cast<int>(free_idx.size());
        const Vec qx = apply(x);
        Vec rhs(F);
        for (int k = 0; k < F; ++k) rhs[k] = -qx[free_idx[static_cast<std::size_t>(k)]];

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(F) * 9);
        const double nn = static_cast<double>(n_) * n_;
        for (int k = 0; k < F; ++k) {
            const int p = free_idx[static_cast<std::size_t>(k)];
            const int a = p / m_, b = p % m_;
            for (int da = -1; da <= 1; ++da) {
                const int aa = a + da;
                if (aa < 0 || aa >= m_) continue;
                for (int db = -1; db <= 1; ++db) {
                    const int bb = b + db;
                    if (bb < 0 || bb >= m_) continue;
                    const int col = pos[static_cast<std::size_t>(aa * m_ + bb)];
                    if (col >= 0) trip.emplace_back(k, col, nn * coef(da) * coef(db));
                }
            }
        }
        SpMat qff(F, F);
        qff.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SpMat> ldlt(qff);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("project_polar_cone: reduced system factorisation failed", 0.0, 0);
        Vec xf = ldlt.solve(rhs);
        // one step of iterative refinement
        const Vec r = rhs - qff * xf;
        xf += ldlt.solve(r);
        for (int k = 0; k < F; ++k) x[free_idx[static_cast<std::size_t>(k)]] = xf[k];
        return x;
    }

    struct Outcome {
        Vec x;
        int iterations = 0;
        std::string method;
    };

    Outcome run(const GridFn2D& warm) {
        int used = 0;
        if (opts_.method != QpMethod::PrimalActiveSet) {
            if (auto x = pdas(used)) return {*x, used, "primal-dual-active-set"};
            if (opts_.method == QpMethod::PrimalDualActiveSet)
                throw SolverError("project_polar_cone: primal-dual active set failed to settle",
                                  last_residual_, used);
        }
        const int budget = opts_.max_iter - used;
        Vec start(size());
        for (int i = 1; i < n_; ++i)
            for (int j = 1; j < n_; ++j) start[flat(i, j)] = warm(i, j);
        int pas_iters = 0;
        Vec x = primal_active_set(start, budget, pas_iters);
        return {x, used + pas_iters,
                used ? "primal-dual-active-set+primal-active-set" : "primal-active-set"};
    }

    double kkt_residual(const Vec& x, const Vec& lambda) const {
        double r = 0.0;
        for (int p = 0; p < size(); ++p) {
            const double gap = x[p] - lower_[p];
            r = std::max(r, -gap);
            r = std::max(r, -lambda[p]);
            if (gap > opts_.tol) r = std::max(r, std::abs(lambda[p]));
        }
        return r;
    }

    std::size_t flat(int i, int j) const {
        return static_cast<std::size_t>((i - 1) * m_ + (j - 1));
    }

private:
    static double coef(int d) { return d == 0 ? 2.0 : -1.0; }

    std::optional<Vec> pdas(int& iters) {
        const int N = size();
        std::vector<char> active(static_cast<std::size_t>(N));
        for (int p = 0; p < N; ++p) active[static_cast<std::size_t>(p)] = lower_[p] > 0.0;
        std::set<std::vector<char>> seen;
        seen.insert(active);
        const int limit = std::min(opts_.max_iter, 200);
        while (iters < limit) {
            ++iters;
            Vec x = solve_with_fixed(active);
            Vec lambda = apply(x);
            std::vector<char> next(static_cast<std::size_t>(N));
            for (int p = 0; p < N; ++p) {
                const auto k = static_cast<std::size_t>(p);
                next[k] = active[k] ? lambda[p] >= -mult_tol_ : x[p] < lower_[p] - gap_tol_;
            }
            if (next == active) return x;
            if (!seen.insert(next).second) {
                for (int p = 0; p < N; ++p)
                    if (!active[static_cast<std::size_t>(p)]) lambda[p] = 0.0;
                last_residual_ = kkt_residual(x, lambda);
                return std::nullopt;
            }
            active = std::move(next);
        }
        return std::nullopt;
    }

    // Classical feasible-point active-set method; each step adds one blocking
    // bound or releases the most negative multiplier.
    Vec primal_active_set(Vec x, int budget, int& iters) {
        const int N = size();
        std::vector<char> work(static_cast<std::size_t>(N));
        for (int p = 0; p < N; ++p) {
            x[p] = std::max(x[p], lower_[p]);
            work[static_cast<std::size_t>(p)] = x[p] <= lower_[p] + gap_tol_;
            if (work[static_cast<std::size_t>(p)]) x[p] = lower_[p];
        }
        while (iters < budget) {
            ++iters;
            const Vec target = solve_with_fixed(work);
            const Vec step = target - x;
            if (step.lpNorm<Eigen::Infinity>() <= gap_tol_) {
                x = target;
                const Vec lambda = apply(x);
                int worst = -1;
                double most = -mult_tol_;
                for (int p = 0; p < N; ++p) {
                    if (work[static_cast<std::size_t>(p)] && lambda[p] < most) {
                        most = lambda[p];
                        worst = p;
                    }
                }
                if (worst < 0) return x;
                work[static_cast<std::size_t>(worst)] = 0;
                continue;
            }
            double alpha = 1.0;
            int blocking = -1;
            for (int p = 0; p < N; ++p) {
                if (work[static_cast<std::size_t>(p)] || step[p] >= 0.0) continue;
                const double a = (lower_[p] - x[p]) / step[p];
                if (a < alpha) {
                    alpha = a;
                    blocking = p;
                }
            }
            x += std::max(alpha, 0.0) * step;
            if (blocking >= 0) {
                work[static_cast<std::size_t>(blocking)] = 1;
                x[blocking] = lower_[blocking];
            }
        }
        Vec lambda = apply(x);
        throw SolverError("project_polar_cone: no convergence within max_iter",
                          kkt_residual(x, lambda), iters);
    }

    int n_;
    int m_;
    SolverOptions opts_;
    Vec lower_;
    double scale_ = 1.0;
    double gap_tol_ = 0.0;
    double mult_tol_ = 0.0;
    double last_residual_ = 0.0;
};

}  // namespace

ProjectionResult project_polar_cone(const GridFn2D& h, const SolverOptions& opts) {
    h.require_h0("project_polar_cone");
    const int n = h.n();

    ProjectionResult out{GridFn2D(n), GridFn2D(n), 0.0, GridFn2D(n), {}, 0, 0.0, ""};

    bool trivial = true;
    for (double v : h.values()) trivial = trivial && v <= 0.0;
    if (trivial) {
        // 0 is feasible, in the polar cone and orthogonal to h.
        out.v_part = h;
        out.method = "closed-form";
    } else {
        BoxQp qp(h, opts);
        auto outcome = qp.run(feasible_start(h));
        const Vec lambda_raw = qp.apply(outcome.x);
        for (int i = 1; i < n; ++i) {
            for (int j = 1; j < n; ++j) {
                const auto p = qp.flat(i, j);
                out.h_bar(i, j) = outcome.x[static_cast<Eigen::Index>(p)];
            }
        }
        out.iterations = outcome.iterations;
        out.method = std::move(outcome.method);
        out.v_part = h - out.h_bar;
        const auto atoms = node_measure(mixed_second_diff(out.h_bar));
        for (int i = 1; i < n; ++i)
            for (int j = 1; j < n; ++j) out.multipliers(i, j) = atoms(i, j);
        out.residual = qp.kkt_residual(outcome.x, lambda_raw);
        if (out.residual > opts.tol) {
            std::ostringstream os;
            os << "project_polar_cone: KKT residual " << out.residual << " exceeds tol " << opts.tol;
            throw SolverError(os.str(), out.residual, out.iterations);
        }
    }

    out.norm = rkhs_norm(out.h_bar);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (std::abs(out.h_bar(i, j) - h(i, j)) <= opts.tol) out.contact_set.emplace_back(i, j);
    return out;
}

ProjectionResult project_W(const GridFn2D& h, const SolverOptions& opts) {
    h.require_h0("project_W");
    ProjectionResult r = project_polar_cone(-1.0 * h, opts);
    r.h_bar *= -1.0;
    r.v_part = h - r.h_bar;
    return r;
}

// ---- verification -----------------------------------------------------------

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const ProjectionCheck& VerificationReport::at(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no check named " + name);
}

VerificationReport verify_projection(const GridFn2D& h, const ProjectionResult& pr, double tol) {
    require_same_grid(h.n(), pr.h_bar.n(), "verify_projection");
    const int n = h.n();
    VerificationReport rep;

    double infeas = 0.0, v_pos = 0.0, split = 0.0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            infeas = std::max(infeas, h(i, j) - pr.h_bar(i, j));
            v_pos = std::max(v_pos, pr.v_part(i, j));
            split = std::max(split, std::abs(pr.h_bar(i, j) + pr.v_part(i, j) - h(i, j)));
        }
    }
    rep.checks.push_back({"feasibility", infeas <= tol, std::max(infeas, 0.0)});
    rep.checks.push_back({"v_membership", v_pos <= tol, std::max(v_pos, 0.0)});
    rep.checks.push_back({"decomposition", split <= 1e-12 * std::max(1.0, h.max_abs()), split});

    const GridFn2D v = h - pr.h_bar;
    const double nb2 = rkhs_inner(pr.h_bar, pr.h_bar);
    const double orth = std::abs(rkhs_inner(pr.h_bar, v));
    rep.checks.push_back({"orthogonality", orth <= tol * nb2, nb2 > 0 ? orth / nb2 : orth});

    const auto atoms = node_measure(mixed_second_diff(pr.h_bar));
    double neg = 0.0, slack = 0.0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            neg = std::max(neg, -atoms(i, j));
            if (pr.h_bar(i, j) - h(i, j) > tol) slack = std::max(slack, std::abs(atoms(i, j)));
        }
    }
    rep.checks.push_back({"measure_nonnegative", neg <= tol, neg});
    rep.checks.push_back({"complementary_slackness", slack <= tol, slack});
    return rep;
}

}  // namespace pillow
