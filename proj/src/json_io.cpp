#include "pillow/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace pillow {

using nlohmann::ordered_json;

namespace {

ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json pairs(const std::vector<std::pair<int, int>>& v) {
    ordered_json a = ordered_json::array();
    for (auto [i, j] : v) a.push_back({i, j});
    return a;
}

}  // namespace

ordered_json to_json(const GridFn1D& g) {
    ordered_json a = ordered_json::array();
    for (double x : g.values()) a.push_back(num(x));
    return a;
}

ordered_json to_json(const GridFn2D& g) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i <= g.n(); ++i) {
        ordered_json r = ordered_json::array();
        for (int j = 0; j <= g.n(); ++j) r.push_back(num(g(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

ordered_json to_json(const McEstimate& e) {
    ordered_json j;
    j["p_hat"] = num(e.p_hat);
    j["log_p_hat"] = num(e.log_p_hat);
    j["std_err"] = num(e.std_err);
    j["log_std_err"] = num(e.log_std_err);
    j["ci95"] = {num(e.ci95.first), num(e.ci95.second)};
    j["n_paths"] = e.n_paths;
    j["n_grid"] = e.n_grid;
    j["seed"] = e.seed;
    j["stream_id"] = e.stream_id;
    j["weighted"] = e.weighted;
    if (e.weighted) j["ess"] = num(e.ess);
    j["flags"] = e.flags;
    return j;
}

ordered_json to_json(const MajorantResult1D& m) {
    ordered_json j;
    j["n"] = m.h_tilde.n();
    j["norm"] = num(m.norm);
    j["norm2"] = num(m.norm * m.norm);
    j["knots"] = m.knots;
    j["h_tilde"] = to_json(m.h_tilde);
    return j;
}

ordered_json to_json(const ProjectionResult& pr) {
    ordered_json j;
    j["n"] = pr.h_bar.n();
    j["norm"] = num(pr.norm);
    j["norm2"] = num(pr.norm * pr.norm);
    j["residual"] = num(pr.residual);
    j["iterations"] = pr.iterations;
    j["method"] = pr.method;
    j["contact_set"] = pairs(pr.contact_set);
    j["h_bar"] = to_json(pr.h_bar);
    j["multipliers"] = to_json(pr.multipliers);
    return j;
}

ordered_json to_json(const VerificationReport& v) {
    ordered_json j;
    j["all_pass"] = v.all_pass();
    for (const auto& c : v.checks) j["checks"][c.name] = {{"pass", c.pass}, {"residual", num(c.residual)}};
    return j;
}

ordered_json to_json(const Psi0Bound& b) {
    ordered_json j;
    j["value"] = num(b.value);
    j["argmin"] = b.argmin;
    j["argmin_name"] = b.argmin_name;
    j["n_candidates"] = b.values.size();
    return j;
}

ordered_json to_json(const ProductBounds& b) {
    ordered_json j;
    j["norm2"] = num(b.norm2);
    j["upper_integral"] = num(b.upper_integral);
    j["lower_integral"] = num(b.lower_integral);
    j["log_upper"] = num(b.log_upper);
    j["log_lower"] = num(b.log_lower);
    j["upper"] = num(b.upper);
    j["lower"] = num(b.lower);
    j["upper_exponent_2d"] = num(b.upper_exponent_2d);
    j["cross_check_rel_err"] = num(b.cross_check_rel_err);
    return j;
}

ordered_json to_json(const BoundReport& r) {
    ordered_json j;
    j["psi0_hat"] = to_json(r.psi0_hat);
    j["theta"] = num(r.theta);
    j["theta_ci95"] = {num(r.theta_ci95.first), num(r.theta_ci95.second)};
    j["norm_h"] = num(r.norm_h);
    j["norm_h_low"] = num(r.norm_h_low);
    j["norm_h_up"] = num(r.norm_h_up);
    j["shift_lower"] = num(r.shift_lower);
    j["shift_upper"] = num(r.shift_upper);
    j["diff_lower"] = num(r.diff_lower);
    j["diff_upper"] = num(r.diff_upper);
    j["coarse_diff"] = num(r.coarse_diff);
    j["exp_lower"] = num(r.exp_lower);
    j["exp_upper"] = num(r.exp_upper);
    j["corner_term"] = num(r.corner_term);
    j["stieltjes_I"] = num(r.stieltjes_I);
    j["stieltjes_I_lower"] = num(r.stieltjes_I_lower);
    j["constant_upper"] = r.constant_upper ? num(*r.constant_upper) : ordered_json(nullptr);
    j["psi0_upper"] = to_json(r.psi0_upper);
    j["psi_residual"] = to_json(r.psi_residual);
    j["band"] = to_json(r.band);
    j["psi_hat"] = r.psi_hat ? to_json(*r.psi_hat) : ordered_json(nullptr);
    j["relaxed"] = r.relaxed;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"lhs", num(c.lhs)},
                          {"rhs", num(c.rhs)}, {"slack", num(c.slack)}});
    }
    j["checks"] = checks;
    j["all_pass"] = r.all_pass();
    j["flags"] = r.flags;
    return j;
}

ordered_json to_json(const SweepResult& s) {
    ordered_json j;
    j["norm_h_low"] = num(s.norm_h_low);
    j["stieltjes_I"] = num(s.stieltjes_I);
    j["contact_set"] = pairs(s.contact_set);
    j["contact_estimate"] = to_json(s.contact_estimate);
    ordered_json rows = ordered_json::array();
    for (const auto& r : s.rows) {
        ordered_json o;
        o["gamma"] = num(r.gamma);
        o["log_psi_hat"] = num(r.log_psi_hat);
        o["log_std_err"] = num(r.log_std_err);
        o["rate_hat"] = num(r.rate_hat);
        o["remainder_hat"] = num(r.remainder_hat);
        o["ess"] = num(r.ess);
        o["flags"] = r.flags;
        if (!r.error.empty()) o["error"] = r.error;
        rows.push_back(std::move(o));
    }
    j["rows"] = rows;
    return j;
}

std::string sweep_csv(const SweepResult& s) {
    std::string out = "gamma,log_psi,rate,remainder,std_err\n";
    char buf[160];
    for (const auto& r : s.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.gamma, r.log_psi_hat,
                      r.rate_hat, r.remainder_hat, r.log_std_err);
        out += buf;
    }
    return out;
}

}  // namespace pillow
