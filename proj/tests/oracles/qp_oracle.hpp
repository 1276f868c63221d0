#pragma once

// Independent reference for min ‖g‖ over g ≥ h, g = 0 on the boundary.
//
// Dual form: g = Gλ with G the closed-form pillow covariance between interior
// nodes (the inverse of the discrete RKHS Gram operator), and
//     min ½ λᵀGλ − hᵀλ  over λ ≥ 0,
// solved with a Lawson–Hanson style active set on dense matrices. Shares no
// code with the library solver.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double bridge(double s, double t) { return std::min(s, t) - s * t; }

struct QpSolution {
    std::vector<double> g;       // (n+1)² node values, row-major
    std::vector<double> lambda;  // (n+1)², zero on the boundary
    int iterations = 0;
};

inline QpSolution min_norm_majorant(const std::vector<double>& h, int n) {
    const int m = n - 1;
    const int N = m * m;
    auto node = [n](int i, int j) { return i * (n + 1) + j; };
    Eigen::MatrixXd G(N, N);
    Eigen::VectorXd hv(N);
    for (int a = 0; a < N; ++a) {
        const double sa = (a / m + 1) / double(n), ta = (a % m + 1) / double(n);
        hv(a) = h[node(a / m + 1, a % m + 1)];
        for (int b = 0; b < N; ++b) {
            const double sb = (b / m + 1) / double(n), tb = (b % m + 1) / double(n);
            G(a, b) = bridge(sa, sb) * bridge(ta, tb);
        }
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    std::vector<char> passive(N, 0);
    const double eps = 1e-14 * std::max(1.0, hv.cwiseAbs().maxCoeff());
    int iter = 0;
    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<int> idx;
        for (int i = 0; i < N; ++i)
            if (passive[i]) idx.push_back(i);
        const int k = static_cast<int>(idx.size());
        Eigen::MatrixXd A(k, k);
        Eigen::VectorXd r(k);
        for (int p = 0; p < k; ++p) {
            r(p) = hv(idx[p]);
            for (int q = 0; q < k; ++q) A(p, q) = G(idx[p], idx[q]);
        }
        const Eigen::VectorXd s = A.ldlt().solve(r);
        z.setZero();
        for (int p = 0; p < k; ++p) z(idx[p]) = s(p);
    };
    while (iter < 10 * N) {
        ++iter;
        const Eigen::VectorXd w = hv - G * x;
        int best = -1;
        for (int i = 0; i < N; ++i)
            if (!passive[i] && w(i) > eps && (best < 0 || w(i) > w(best))) best = i;
        if (best < 0) break;
        passive[best] = 1;
        Eigen::VectorXd z(N);
        for (;;) {
            solve_passive(z);
            bool ok = true;
            for (int i = 0; i < N; ++i)
                if (passive[i] && z(i) <= 0.0) ok = false;
            if (ok) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (int i = 0; i < N; ++i)
                if (passive[i] && z(i) <= 0.0) alpha = std::min(alpha, x(i) / (x(i) - z(i)));
            x += alpha * (z - x);
            for (int i = 0; i < N; ++i)
                if (passive[i] && x(i) <= 1e-15) {
                    passive[i] = 0;
                    x(i) = 0.0;
                }
        }
    }

    const Eigen::VectorXd g = G * x;
    QpSolution out;
    out.iterations = iter;
    out.g.assign(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
    out.lambda = out.g;
    for (int a = 0; a < N; ++a) {
        out.g[node(a / m + 1, a % m + 1)] = g(a);
        out.lambda[node(a / m + 1, a % m + 1)] = x(a);
    }
    return out;
}

}  // namespace oracle
