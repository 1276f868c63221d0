#include "pillow/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace pillow {

namespace {

double param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void check_params(const Params& p, std::initializer_list<const char*> allowed,
                  const std::string& name) {
    for (const auto& [k, v] : p) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            throw DomainError("builtin '" + name + "' has no parameter '" + k + "'");
    }
}

double four_vertex(double s) {
    // vertices (0,0) (0.5,0.1) (0.75,0.5) (1,0)
    if (s <= 0.5) return 0.2 * s;
    if (s <= 0.75) return 0.1 + 1.6 * (s - 0.5);
    return 2.0 * (1.0 - s);
}

std::function<double(double)> profile_1d(const std::string& name, const Params& p) {
    if (name == "parabola") {
        check_params(p, {"scale"}, name);
        return [](double s) { return s * (1.0 - s); };
    }
    if (name == "tent") {
        check_params(p, {"scale"}, name);
        return [](double s) { return std::min(s, 1.0 - s); };
    }
    if (name == "skew-tent") {
        check_params(p, {"scale", "apex"}, name);
        const double a = param(p, "apex", 0.3);
        if (!(a > 0.0 && a < 1.0)) throw DomainError("skew-tent: apex must lie in (0,1)");
        return [a](double s) { return std::min(s / (2.0 * a), (1.0 - s) / (2.0 * (1.0 - a))); };
    }
    if (name == "four-vertex") {
        check_params(p, {"scale"}, name);
        return four_vertex;
    }
    return {};
}

}  // namespace

std::vector<std::string> builtin_names_1d() {
    return {"parabola", "tent", "skew-tent", "four-vertex"};
}

std::vector<std::string> builtin_names_2d() {
    return {"parabola-product", "tent-product", "negative-bump", "mixed-sign"};
}

GridFn1D builtin_trend_1d(const std::string& name, const Params& params, int n) {
    auto f = profile_1d(name, params);
    if (!f) throw DomainError("unknown 1D builtin '" + name + "'");
    const double scale = param(params, "scale", 1.0);
    GridFn1D g = GridFn1D::sample(n, [&](double s) { return scale * f(s); });
    g[0] = 0.0;
    g[n] = 0.0;
    return g;
}

GridFn2D builtin_trend_2d(const std::string& name, const Params& params, int n) {
    const double pi = std::numbers::pi;
    std::function<double(double, double)> f;
    if (name == "parabola-product") {
        f = [](double s, double t) { return s * (1.0 - s) * t * (1.0 - t); };
    } else if (name == "tent-product") {
        f = [](double s, double t) { return std::min(s, 1.0 - s) * std::min(t, 1.0 - t); };
    } else if (name == "negative-bump") {
        f = [pi](double s, double t) { return -0.5 * std::sin(pi * s) * std::sin(pi * t); };
    } else if (name == "mixed-sign") {
        f = [pi](double s, double t) {
            return 0.25 * std::sin(2 * pi * s) * std::sin(pi * t) +
                   0.1 * std::sin(pi * s) * std::sin(2 * pi * t);
        };
    }
    if (f) {
        check_params(params, {"scale"}, name);
    } else if (auto g = profile_1d(name, params)) {
        f = [g](double s, double t) { return g(s) * g(t); };
    } else {
        throw DomainError("unknown 2D builtin '" + name + "'");
    }
    const double scale = param(params, "scale", 1.0);
    GridFn2D h = GridFn2D::sample(n, [&](double s, double t) { return scale * f(s, t); });
    for (int i = 0; i <= n; ++i) {
        h(i, 0) = h(i, n) = 0.0;
        h(0, i) = h(n, i) = 0.0;
    }
    return h;
}

}  // namespace pillow
