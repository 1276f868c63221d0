#include "pillow/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pillow/pillow_sim.hpp"

namespace pillow {

bool McEstimate::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Running Σw and Σw² in log-safe form for the weights of paths that hit.
struct LogAccumulator {
    std::int64_t hits = 0;
    double shift = -kInf;  // max log weight seen
    double s1 = 0.0;       // Σ exp(lw − shift)
    double s2 = 0.0;       // Σ exp(2(lw − shift))

    void add(double lw) {
        ++hits;
        if (lw > shift) {
            const double r = std::exp(shift - lw);
            s1 *= r;
            s2 *= r * r;
            shift = lw;
        }
        const double e = std::exp(lw - shift);
        s1 += e;
        s2 += e * e;
    }

    void merge(const LogAccumulator& o) {
        if (o.hits == 0) return;
        if (hits == 0) {
            *this = o;
            return;
        }
        const double m = std::max(shift, o.shift);
        const double a = std::exp(shift - m), b = std::exp(o.shift - m);
        s1 = s1 * a + o.s1 * b;
        s2 = s2 * a * a + o.s2 * b * b;
        shift = m;
        hits += o.hits;
    }
};

void require_paths(const McOptions& o) {
    if (o.n_paths < 100) throw DomainError("estimator: n_paths must be at least 100");
    if (o.blocks < 1) throw DomainError("estimator: blocks must be positive");
}

McEstimate finish(const LogAccumulator& acc, const McOptions& o, int n, bool weighted) {
    McEstimate e;
    e.n_paths = o.n_paths;
    e.n_grid = n;
    e.seed = o.seed;
    e.stream_id = o.stream_id;
    e.weighted = weighted;
    const double N = static_cast<double>(o.n_paths);
    if (acc.hits == 0) {
        e.p_hat = 0.0;
        e.log_p_hat = -kInf;
        e.std_err = 0.0;
        e.log_std_err = kInf;
        e.ess = 0.0;
    } else {
        e.log_p_hat = acc.shift + std::log(acc.s1) - std::log(N);
        e.p_hat = std::exp(e.log_p_hat);
        // Var = E[w²] − p² with E[w²] = exp(2·shift)·s2/N; computed relative to p².
        const double rel = N * acc.s2 / (acc.s1 * acc.s1) - 1.0;  // E[w²]/p² − 1
        e.log_std_err = std::sqrt(std::max(rel, 0.0) / N);
        e.std_err = e.p_hat * e.log_std_err;
        e.ess = acc.s1 * acc.s1 / acc.s2;
    }
    e.ci95 = {std::clamp(e.p_hat - 1.96 * e.std_err, 0.0, 1.0),
              std::clamp(e.p_hat + 1.96 * e.std_err, 0.0, 1.0)};
    return e;
}

McEstimate deterministic_zero(const McOptions& o, int n, bool weighted) {
    McEstimate e = finish(LogAccumulator{}, o, n, weighted);
    e.flags.push_back("deterministic_zero");
    return e;
}

/// Runs `visit(path, accs)` on every path of a grid-n pillow and merges the
/// per-block accumulators in block order.
template <class Visit>
std::vector<LogAccumulator> simulate(int n, const McOptions& o, std::size_t outputs,
                                     const Visit& visit) {
    const int blocks = static_cast<int>(std::min<std::int64_t>(o.blocks, o.n_paths));
    std::vector<std::vector<LogAccumulator>> per_block(
        static_cast<std::size_t>(blocks), std::vector<LogAccumulator>(outputs));
    const std::int64_t base = o.n_paths / blocks, extra = o.n_paths % blocks;
    auto block_begin = [&](int b) { return b * base + std::min<std::int64_t>(b, extra); };

    auto work = [&](int first, int stride) {
        PillowSampler sampler(n, RngKey{o.seed, o.stream_id});
        GridFn2D path(n);
        for (int b = first; b < blocks; b += stride) {
            auto& accs = per_block[static_cast<std::size_t>(b)];
            for (std::int64_t k = block_begin(b); k < block_begin(b + 1); ++k) {
                sampler.pillow(static_cast<std::uint64_t>(k), path);
                visit(path, accs);
            }
        }
    };

    int threads = o.threads > 0 ? o.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, blocks);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t, threads);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    std::vector<LogAccumulator> total(outputs);
    for (const auto& accs : per_block)
        for (std::size_t k = 0; k < outputs; ++k) total[k].merge(accs[k]);
    return total;
}

/// True when some boundary node has threshold < 0, i.e. B₀ = 0 already violates B₀ ≤ threshold.
bool boundary_blocks(const GridFn2D& threshold) {
    const int n = threshold.n();
    for (int k = 0; k <= n; ++k) {
        if (threshold(0, k) < 0.0 || threshold(n, k) < 0.0 || threshold(k, 0) < 0.0 ||
            threshold(k, n) < 0.0)
            return true;
    }
    return false;
}

bool below_interior(const GridFn2D& path, const GridFn2D& threshold) {
    const int n = path.n();
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            if (!(path(i, j) <= threshold(i, j))) return false;
    return true;
}

/// Σ_cells f(a,b) · (B_{a+1,b+1} − B_{a+1,b} − B_{a,b+1} + B_{a,b}).
double discrete_ito(const CellField2D& f, const GridFn2D& path) {
    const int n = path.n();
    double acc = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            acc += f(a, b) * (path(a + 1, b + 1) - path(a + 1, b) - path(a, b + 1) + path(a, b));
    return acc;
}

}  // namespace

McEstimate estimate_direct(const GridFn2D& u, const GridFn2D& h, const McOptions& opts) {
    require_same_grid(u.n(), h.n(), "estimate_direct");
    require_paths(opts);
    const GridFn2D threshold = u - h;
    if (boundary_blocks(threshold)) return deterministic_zero(opts, u.n(), false);
    const auto acc = simulate(u.n(), opts, 1, [&](const GridFn2D& path, auto& accs) {
        if (below_interior(path, threshold)) accs[0].add(0.0);
    });
    return finish(acc[0], opts, u.n(), false);
}

McEstimate estimate_cm(const GridFn2D& u, const GridFn2D& h, const GridFn2D& shift,
                       const McOptions& opts) {
    require_same_grid(u.n(), h.n(), "estimate_cm");
    require_same_grid(u.n(), shift.n(), "estimate_cm");
    require_paths(opts);
    shift.require_h0("estimate_cm shift");
    const GridFn2D threshold = u - (h - shift);
    if (boundary_blocks(threshold)) return deterministic_zero(opts, u.n(), true);

    const CellField2D f = mixed_second_diff(shift);
    const GridFn2D atoms = node_measure(f);
    const double half_norm2 = 0.5 * rkhs_inner(shift, shift);
    const bool check = opts.check_ibp;

    const auto acc = simulate(u.n(), opts, 1, [&](const GridFn2D& path, auto& accs) {
        if (!below_interior(path, threshold)) return;
        const double ito = discrete_ito(f, path);
        if (check) {
            double by_parts = 0.0;
            const auto pv = path.values();
            const auto av = atoms.values();
            for (std::size_t k = 0; k < pv.size(); ++k) by_parts += pv[k] * av[k];
            if (std::abs(ito - by_parts) > 1e-10 * std::max(1.0, std::abs(ito)))
                throw std::logic_error("estimate_cm: stochastic integral forms disagree");
        }
        accs[0].add(ito - half_norm2);
    });
    McEstimate e = finish(acc[0], opts, u.n(), true);
    if (e.ess < 50.0) e.flags.push_back("low_ess");
    return e;
}

McEstimate estimate_cm_weight_mean(const GridFn2D& shift, const McOptions& opts) {
    require_paths(opts);
    shift.require_h0("estimate_cm_weight_mean");
    const CellField2D f = mixed_second_diff(shift);
    const double half_norm2 = 0.5 * rkhs_inner(shift, shift);
    const auto acc = simulate(shift.n(), opts, 1, [&](const GridFn2D& path, auto& accs) {
        accs[0].add(discrete_ito(f, path) - half_norm2);
    });
    return finish(acc[0], opts, shift.n(), true);
}

McEstimate estimate_band_on(const GridFn2D& l, const GridFn2D& u,
                            const std::vector<std::pair<int, int>>& nodes, const McOptions& opts) {
    require_same_grid(l.n(), u.n(), "estimate_band");
    require_paths(opts);
    const int n = u.n();
    std::vector<std::size_t> interior;
    for (const auto& [i, j] : nodes) {
        if (i < 0 || j < 0 || i > n || j > n)
            throw DomainError("estimate_band_on: node outside the grid");
        if (l(i, j) > u(i, j)) {
            std::ostringstream os;
            os << "estimate_band: l > u at node (" << i << "," << j << ")";
            throw DomainError(os.str());
        }
        if (u.on_boundary(i, j)) {
            if (l(i, j) > 0.0 || u(i, j) < 0.0) return deterministic_zero(opts, n, false);
        } else {
            interior.push_back(u.index(i, j));
        }
    }
    const auto lv = l.values();
    const auto uv = u.values();
    const auto acc = simulate(n, opts, 1, [&](const GridFn2D& path, auto& accs) {
        const auto pv = path.values();
        for (std::size_t k : interior)
            if (!(lv[k] <= pv[k] && pv[k] <= uv[k])) return;
        accs[0].add(0.0);
    });
    return finish(acc[0], opts, n, false);
}

McEstimate estimate_band(const GridFn2D& l, const GridFn2D& u, const McOptions& opts) {
    require_same_grid(l.n(), u.n(), "estimate_band");
    std::vector<std::pair<int, int>> all;
    for (int i = 0; i <= u.n(); ++i)
        for (int j = 0; j <= u.n(); ++j) all.emplace_back(i, j);
    return estimate_band_on(l, u, all, opts);
}

McEstimate estimate_small_ball(double eps, int n, const McOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("estimate_small_ball: eps must be positive");
    require_paths(opts);
    const auto acc = simulate(n, opts, 1, [&](const GridFn2D& path, auto& accs) {
        for (double v : path.values())
            if (!(std::abs(v) < eps)) return;
        accs[0].add(0.0);
    });
    return finish(acc[0], opts, n, false);
}

std::vector<McEstimate> estimate_refinement(const SurfaceFn& u, const SurfaceFn& h,
                                            const std::vector<int>& ns, const McOptions& opts) {
    if (ns.empty()) throw DomainError("estimate_refinement: no grid sizes");
    require_paths(opts);
    const int fine = *std::max_element(ns.begin(), ns.end());
    std::vector<GridFn2D> thresholds;
    std::vector<int> stride;
    std::vector<char> blocked;
    for (int n : ns) {
        if (n < 2 || fine % n != 0)
            throw DomainError("estimate_refinement: grid " + std::to_string(n) +
                              " is not nested in " + std::to_string(fine));
        GridFn2D t = GridFn2D::sample(n, u) - GridFn2D::sample(n, h);
        blocked.push_back(boundary_blocks(t));
        thresholds.push_back(std::move(t));
        stride.push_back(fine / n);
    }
    const auto acc = simulate(fine, opts, ns.size(), [&](const GridFn2D& path, auto& accs) {
        for (std::size_t k = 0; k < ns.size(); ++k) {
            if (blocked[k]) continue;
            const int n = ns[k], r = stride[k];
            const GridFn2D& t = thresholds[k];
            bool ok = true;
            for (int i = 1; i < n && ok; ++i)
                for (int j = 1; j < n; ++j)
                    if (!(path(i * r, j * r) <= t(i, j))) {
                        ok = false;
                        break;
                    }
            if (ok) accs[k].add(0.0);
        }
    });
    std::vector<McEstimate> out;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        out.push_back(blocked[k] ? deterministic_zero(opts, ns[k], false)
                                 : finish(acc[k], opts, ns[k], false));
    }
    return out;
}

SweepResult gamma_sweep(const GridFn2D& u, const GridFn2D& h, const std::vector<double>& gammas,
                        const McOptions& opts, const SolverOptions& solver) {
    require_same_grid(u.n(), h.n(), "gamma_sweep");
    h.require_h0("gamma_sweep");
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        if (!(gammas[k] > 0.0) || (k > 0 && !(gammas[k] > gammas[k - 1])))
            throw DomainError("gamma_sweep: gammas must be positive and increasing");
    }
    const ProjectionResult pr = project_polar_cone(h, solver);
    SweepResult out;
    out.norm_h_low = pr.norm;
    out.stieltjes_I = stieltjes_integral_2d(u, mixed_second_diff(pr.h_bar));
    out.contact_set = pr.contact_set;
    GridFn2D lower(u.n());
    for (double& v : lower.values()) v = -kInf;
    out.contact_estimate = estimate_band_on(lower, u, pr.contact_set, opts);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double g : gammas) {
        SweepRow row;
        row.gamma = g;
        try {
            const McEstimate e = estimate_cm(u, g * h, g * pr.h_bar, opts);
            row.log_psi_hat = e.log_p_hat;
            row.log_std_err = e.log_std_err;
            row.ess = e.ess;
            row.flags = e.flags;
            row.rate_hat = -2.0 * e.log_p_hat / (g * g);
            row.remainder_hat = e.log_p_hat + 0.5 * g * g * pr.norm * pr.norm - g * out.stieltjes_I;
        } catch (const std::exception& ex) {
            row.error = ex.what();
            row.log_psi_hat = row.log_std_err = row.rate_hat = row.remainder_hat = nan;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace pillow
