#include "pillow/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pillow/normal.hpp"

namespace pillow {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/√(2π)

struct Integral {
    double value = 0.0;
    double edge = 0.0;
};

Integral integrate(const GridFn2D& g, const CellField2D& f) {
    require_same_grid(g.n(), f.n(), "stieltjes");
    const GridFn2D atoms = node_measure(f);
    Integral r;
    for (int i = 0; i <= g.n(); ++i) {
        for (int j = 0; j <= g.n(); ++j) {
            const double c = g(i, j) * atoms(i, j);
            r.value += c;
            if (g.on_boundary(i, j)) r.edge += std::abs(c);
        }
    }
    return r;
}

ExpBound make_exp_bound(const GridFn2D& v, const ProjectionResult& pr, double factor) {
    const Integral in = integrate(v, mixed_second_diff(pr.h_bar));
    ExpBound b;
    b.stieltjes = in.value;
    b.edge_mass = in.edge;
    b.log_value = std::log(factor) - 0.5 * pr.norm * pr.norm + in.value;
    b.value = std::exp(b.log_value);
    if (in.edge > 0.01 * std::abs(in.value)) b.flags.push_back("edge_mass");
    return b;
}

void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << what << ": " << p << " is not a probability";
        throw DomainError(os.str());
    }
}

std::optional<double> constant_value(const GridFn2D& g) {
    const auto v = g.values();
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }))
        return v.front();
    return std::nullopt;
}

}  // namespace

ShiftBounds shift_bounds(double psi0, double norm_low, double norm_up) {
    if (!(psi0 > 0.0 && psi0 < 1.0)) {
        std::ostringstream os;
        os << "shift_bounds: psi0 = " << psi0 << " must lie in (0,1)";
        throw DomainError(os.str());
    }
    if (norm_low < 0.0 || norm_up < 0.0) throw DomainError("shift_bounds: negative norm");
    ShiftBounds b;
    b.theta = normal_quantile(psi0);
    b.lower = normal_cdf(b.theta - norm_low);
    b.upper = normal_cdf(b.theta + norm_up);
    return b;
}

DiffBounds diff_bounds(double norm_low, double norm_up) {
    if (norm_low < 0.0 || norm_up < 0.0) throw DomainError("diff_bounds: negative norm");
    return {-norm_low * kInvSqrt2Pi, norm_up * kInvSqrt2Pi};
}

double coarse_diff_bound(double norm_h) { return 2.0 * normal_cdf(0.5 * norm_h) - 1.0; }

ExpBound exp_upper_bound(const GridFn2D& u, const GridFn2D& h, const ProjectionResult& pr,
                         double psi_residual) {
    require_same_grid(u.n(), h.n(), "exp_upper_bound");
    require_same_grid(u.n(), pr.h_bar.n(), "exp_upper_bound");
    require_probability(psi_residual, "exp_upper_bound residual");
    return make_exp_bound(u, pr, psi_residual);
}

ExpBound exp_lower_bound(const GridFn2D& l, const GridFn2D& u, const ProjectionResult& pr,
                         double band) {
    require_same_grid(l.n(), u.n(), "exp_lower_bound");
    require_same_grid(l.n(), pr.h_bar.n(), "exp_lower_bound");
    require_probability(band, "exp_lower_bound band");
    for (int i = 0; i <= l.n(); ++i)
        for (int j = 0; j <= l.n(); ++j)
            if (l(i, j) > u(i, j)) throw DomainError("exp_lower_bound: l > u");
    return make_exp_bound(l, pr, band);
}

ConstantBoundaryBound constant_boundary_upper(double c, const ProjectionResult& pr,
                                              double psi_residual) {
    if (!(c > 0.0)) throw DomainError("constant_boundary_upper: c must be positive");
    require_probability(psi_residual, "constant_boundary_upper residual");
    const CellField2D f = mixed_second_diff(pr.h_bar);
    ConstantBoundaryBound b;
    b.corner = corner_combination(f);
    double mass = 0.0;
    const GridFn2D atoms = node_measure(f);
    for (double a : atoms.values()) mass += a;
    if (std::abs(mass - b.corner) > 1e-10 * std::max(1.0, std::abs(mass)))
        throw std::logic_error("constant_boundary_upper: corner combination != measure mass");
    b.log_value = std::log(psi_residual) - 0.5 * pr.norm * pr.norm + c * b.corner;
    b.value = std::exp(b.log_value);
    return b;
}

Psi0Bound psi0_upper_bound(const GridFn2D& u, const std::vector<Candidate>& candidates,
                           const SolverOptions& solver) {
    Psi0Bound out;
    bool any = false;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        require_same_grid(u.n(), candidates[k].h.n(), "psi0_upper_bound");
        const ProjectionResult pr = project_polar_cone(candidates[k].h, solver);
        if (!(pr.norm > 0.0)) {
            out.values.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double v =
            normal_cdf(stieltjes_integral_2d(u, mixed_second_diff(pr.h_bar)) / pr.norm);
        out.values.push_back(v);
        if (!any || v < out.value) {
            out.value = v;
            out.argmin = k;
            out.argmin_name = candidates[k].name;
            any = true;
        }
    }
    if (!any) throw DomainError("psi0_upper_bound: every candidate projects to zero");
    return out;
}

std::vector<Candidate> builtin_candidate_family(int n) {
    std::vector<Candidate> out;
    auto tent = [](double apex) {
        return [apex](double s) { return std::min(s / apex, (1.0 - s) / (1.0 - apex)); };
    };
    for (int a = 1; a <= 9; ++a) {
        for (int b = 1; b <= 9; ++b) {
            const auto h1 = GridFn1D::sample(n, tent(a / 10.0));
            const auto h2 = GridFn1D::sample(n, tent(b / 10.0));
            std::ostringstream name;
            name << "tent(" << a / 10.0 << ")x tent(" << b / 10.0 << ")";
            out.push_back({name.str(), outer(h1, h2)});
        }
    }
    const auto par = GridFn1D::sample(n, [](double s) { return s * (1.0 - s); });
    out.push_back({"parabola x parabola", outer(par, par)});
    return out;
}

double product_display_psi0(double c, const std::vector<GridFn1D>& family) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& h : family) {
        const auto d = forward_slopes(h);
        double energy = 0.0;
        for (double x : d) energy += x * x;
        energy /= h.n();
        if (!(energy > 0.0)) continue;
        const double ratio = (d.back() - d.front()) / energy;
        best = std::min(best, normal_cdf(c * c * ratio * ratio));
    }
    if (!std::isfinite(best)) throw DomainError("product_display_psi0: empty family");
    return best;
}

ProductBounds product_bounds(const GridFn1D& u1, const GridFn1D& u2, const GridFn1D& l1,
                             const GridFn1D& l2, const GridFn1D& h1, const GridFn1D& h2,
                             double psi_residual, double band) {
    const int n = h1.n();
    for (const GridFn1D* g : {&u1, &u2, &l1, &l2, &h2}) require_same_grid(n, g->n(), "product_bounds");
    require_probability(psi_residual, "product_bounds residual");
    require_probability(band, "product_bounds band");

    ProductBounds r;
    r.h_tilde = product_majorant(h1, h2);  // throws when the shortcut does not apply
    const auto m1 = least_concave_majorant(h1);
    const auto m2 = least_concave_majorant(h2);
    r.norm2 = m1.norm * m1.norm * m2.norm * m2.norm;
    r.upper_integral = stieltjes_integral_1d(u1, m1.h_tilde) * stieltjes_integral_1d(u2, m2.h_tilde);
    r.lower_integral = stieltjes_integral_1d(l1, m1.h_tilde) * stieltjes_integral_1d(l2, m2.h_tilde);
    r.log_upper = std::log(psi_residual) - 0.5 * r.norm2 + r.upper_integral;
    r.log_lower = std::log(band) - 0.5 * r.norm2 + r.lower_integral;
    r.upper = std::exp(r.log_upper);
    r.lower = std::exp(r.log_lower);

    const double exponent_1d = -0.5 * r.norm2 + r.upper_integral;
    r.upper_exponent_2d = -0.5 * rkhs_inner(r.h_tilde, r.h_tilde) +
                          stieltjes_integral_2d(outer(u1, u2), mixed_second_diff(r.h_tilde));
    r.cross_check_rel_err =
        std::abs(r.upper_exponent_2d - exponent_1d) / std::max(1e-300, std::abs(exponent_1d));
    if (exponent_1d == 0.0 && r.upper_exponent_2d == 0.0) r.cross_check_rel_err = 0.0;
    return r;
}

double product_asymptote(const GridFn1D& u1, const GridFn1D& u2, const GridFn1D& h1,
                         const GridFn1D& h2, double gamma) {
    for (const GridFn1D* u : {&u1, &u2}) {
        const auto v = u->values();
        if (!(*std::min_element(v.begin(), v.end()) > 0.0))
            throw DomainError("product_asymptote: boundary factors must be bounded below by a positive constant");
    }
    const auto m1 = least_concave_majorant(h1);
    const auto m2 = least_concave_majorant(h2);
    const double norm2 = m1.norm * m1.norm * m2.norm * m2.norm;
    const double integral =
        stieltjes_integral_1d(u1, m1.h_tilde) * stieltjes_integral_1d(u2, m2.h_tilde);
    return -0.5 * gamma * gamma * norm2 + gamma * integral;
}

// ---- report -----------------------------------------------------------------

bool BoundReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

BoundReport bound_report(const GridFn2D& u, const GridFn2D& h, const GridFn2D& l,
                         const BoundConfig& cfg) {
    require_same_grid(u.n(), h.n(), "bound_report");
    require_same_grid(u.n(), l.n(), "bound_report");
    h.require_h0("bound_report trend");
    const int n = u.n();

    BoundReport rep;
    rep.relaxed = cfg.relaxed;
    const ProjectionResult low = project_polar_cone(h, cfg.solver);
    const ProjectionResult up = project_W(h, cfg.solver);
    rep.norm_h = rkhs_norm(h);
    rep.norm_h_low = low.norm;
    rep.norm_h_up = up.norm;

    auto stream = [&](std::uint32_t offset) {
        McOptions o = cfg.mc;
        o.stream_id = cfg.mc.stream_id + offset;
        return o;
    };

    const GridFn2D zero(n);
    rep.psi0_hat = estimate_direct(u, zero, stream(0));
    const double psi0 = rep.psi0_hat.p_hat;
    double se_theta = std::numeric_limits<double>::infinity();
    if (psi0 > 0.0 && psi0 < 1.0) {
        const ShiftBounds sb = shift_bounds(psi0, rep.norm_h_low, rep.norm_h_up);
        rep.theta = sb.theta;
        rep.shift_lower = sb.lower;
        rep.shift_upper = sb.upper;
        se_theta = rep.psi0_hat.std_err / normal_pdf(rep.theta);
        rep.theta_ci95 = {rep.theta - 1.96 * se_theta, rep.theta + 1.96 * se_theta};
    } else {
        rep.theta = normal_quantile(psi0);
        rep.theta_ci95 = {rep.theta, rep.theta};
        rep.shift_lower = rep.shift_upper = psi0;
        rep.flags.push_back("psi0_degenerate");
    }
    const DiffBounds db = diff_bounds(rep.norm_h_low, rep.norm_h_up);
    rep.diff_lower = db.lower_delta;
    rep.diff_upper = db.upper_delta;
    rep.coarse_diff = coarse_diff_bound(rep.norm_h);

    if (cfg.relaxed) {
        rep.psi_residual = McEstimate{};
        rep.psi_residual.p_hat = 1.0;
        rep.psi_residual.flags.push_back("relaxed");
    } else {
        rep.psi_residual = estimate_direct(u, low.v_part, stream(2));
    }
    rep.band = estimate_band(l, u, stream(3));

    const ExpBound eu = exp_upper_bound(u, h, low, rep.psi_residual.p_hat);
    const ExpBound el = exp_lower_bound(l, u, low, rep.band.p_hat);
    rep.exp_upper = eu.value;
    rep.exp_lower = el.value;
    rep.stieltjes_I = eu.stieltjes;
    rep.stieltjes_I_lower = el.stieltjes;
    for (const auto& f : eu.flags) rep.flags.push_back("upper_" + f);
    for (const auto& f : el.flags) rep.flags.push_back("lower_" + f);
    rep.corner_term = corner_combination(mixed_second_diff(low.h_bar));
    if (auto c = constant_value(u); c && *c > 0.0) {
        rep.constant_upper = constant_boundary_upper(*c, low, rep.psi_residual.p_hat).value;
    }
    rep.psi0_upper = psi0_upper_bound(u, builtin_candidate_family(n), cfg.solver);

    if (cfg.reconcile) {
        rep.psi_hat = estimate_direct(u, h, stream(1));
        const McEstimate& ps = *rep.psi_hat;
        const double se = ps.std_err;
        auto add = [&](std::string name, double lhs, double rhs, double other_se) {
            const double slack = 3.0 * std::sqrt(se * se + other_se * other_se);
            rep.checks.push_back({std::move(name), lhs <= rhs + slack, lhs, rhs, slack});
        };
        add("shift_lower <= psi", rep.shift_lower, ps.p_hat,
            normal_pdf(rep.theta - rep.norm_h_low) * se_theta);
        add("psi <= shift_upper", ps.p_hat, rep.shift_upper,
            normal_pdf(rep.theta + rep.norm_h_up) * se_theta);
        add("diff_lower <= psi - psi0", rep.diff_lower, ps.p_hat - psi0, rep.psi0_hat.std_err);
        add("psi - psi0 <= diff_upper", ps.p_hat - psi0, rep.diff_upper, rep.psi0_hat.std_err);
        const double band_se =
            rep.band.p_hat > 0.0 ? rep.exp_lower * rep.band.std_err / rep.band.p_hat : 0.0;
        add("exp_lower <= psi", rep.exp_lower, ps.p_hat, band_se);
        const double resid_se =
            rep.psi_residual.p_hat > 0.0
                ? rep.exp_upper * rep.psi_residual.std_err / rep.psi_residual.p_hat
                : 0.0;
        add("psi <= exp_upper", ps.p_hat, rep.exp_upper, resid_se);
        // only ψ̂₀'s error applies here
        const double slack0 = 3.0 * rep.psi0_hat.std_err;
        rep.checks.push_back({"psi0 <= psi0_upper", psi0 <= rep.psi0_upper.value + slack0, psi0,
                              rep.psi0_upper.value, slack0});
    }
    return rep;
}

}  // namespace pillow
