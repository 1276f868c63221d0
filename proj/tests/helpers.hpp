#pragma once

#include <random>

#include "pillow/grid.hpp"

namespace testing {

// Interior values iid uniform on [lo, hi]; boundary exactly zero.
inline pillow::GridFn2D random_h0(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    pillow::GridFn2D g(n);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) g(i, j) = U(rng);
    return g;
}

inline pillow::GridFn1D random_h0_1d(int n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    pillow::GridFn1D g(n);
    for (int i = 1; i < n; ++i) g[i] = U(rng);
    return g;
}

inline pillow::GridFn2D constant(int n, double c) {
    pillow::GridFn2D g(n);
    for (double& v : g.values()) v = c;
    return g;
}

inline double max_abs_diff(const pillow::GridFn2D& a, const pillow::GridFn2D& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k)
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

}  // namespace testing
