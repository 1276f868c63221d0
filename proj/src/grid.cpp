#include "pillow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace pillow {

namespace {

void require_min_cells(int n) {
    if (n < 2) throw DomainError("grid needs at least 2 cells per axis, got n=" + std::to_string(n));
}

}  // namespace

void require_same_grid(int n1, int n2, std::string_view what) {
    if (n1 != n2) {
        std::ostringstream os;
        os << what << ": grid size mismatch (n=" << n1 << " vs n=" << n2 << ")";
        throw DimensionError(os.str());
    }
}

// ---- GridFn1D ---------------------------------------------------------------

GridFn1D::GridFn1D(int n) : n_(n) {
    require_min_cells(n);
    values_.assign(static_cast<std::size_t>(n + 1), 0.0);
}

GridFn1D::GridFn1D(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    require_min_cells(n);
    if (values_.size() != static_cast<std::size_t>(n + 1))
        throw DimensionError("GridFn1D: expected " + std::to_string(n + 1) + " values, got " +
                             std::to_string(values_.size()));
}

bool GridFn1D::vanishes_at_ends() const noexcept {
    return values_.front() == 0.0 && values_.back() == 0.0;
}

void GridFn1D::require_h0(std::string_view what) const {
    for (int i : {0, n_}) {
        if (values_[static_cast<std::size_t>(i)] != 0.0) {
            std::ostringstream os;
            os.precision(17);
            os << what << ": function must vanish at both ends, but node " << i << " holds "
               << values_[static_cast<std::size_t>(i)];
            throw DomainError(os.str());
        }
    }
}

GridFn1D& GridFn1D::operator+=(const GridFn1D& o) {
    require_same_grid(n_, o.n_, "GridFn1D +=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
}

GridFn1D& GridFn1D::operator-=(const GridFn1D& o) {
    require_same_grid(n_, o.n_, "GridFn1D -=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
}

GridFn1D& GridFn1D::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

GridFn1D operator+(GridFn1D a, const GridFn1D& b) { return a += b; }
GridFn1D operator-(GridFn1D a, const GridFn1D& b) { return a -= b; }
GridFn1D operator*(double a, GridFn1D g) { return g *= a; }

// ---- GridFn2D ---------------------------------------------------------------

GridFn2D::GridFn2D(int n) : n_(n) {
    require_min_cells(n);
    values_.assign(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0.0);
}

GridFn2D::GridFn2D(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    require_min_cells(n);
    const auto expected = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
    if (values_.size() != expected)
        throw DimensionError("GridFn2D: expected " + std::to_string(expected) + " values, got " +
                             std::to_string(values_.size()));
}

bool GridFn2D::vanishes_on_boundary() const noexcept {
    for (int k = 0; k <= n_; ++k) {
        if ((*this)(0, k) != 0.0 || (*this)(n_, k) != 0.0 || (*this)(k, 0) != 0.0 ||
            (*this)(k, n_) != 0.0)
            return false;
    }
    return true;
}

void GridFn2D::require_h0(std::string_view what) const {
    for (int i = 0; i <= n_; ++i) {
        for (int j = 0; j <= n_; ++j) {
            if (!on_boundary(i, j) || (*this)(i, j) == 0.0) continue;
            std::ostringstream os;
            os.precision(17);
            os << what << ": function must vanish on the boundary of the grid, but node (" << i
               << "," << j << ") holds " << (*this)(i, j);
            throw DomainError(os.str());
        }
    }
}

double GridFn2D::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFn2D& GridFn2D::operator+=(const GridFn2D& o) {
    require_same_grid(n_, o.n_, "GridFn2D +=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
}

GridFn2D& GridFn2D::operator-=(const GridFn2D& o) {
    require_same_grid(n_, o.n_, "GridFn2D -=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
}

GridFn2D& GridFn2D::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

GridFn2D operator+(GridFn2D a, const GridFn2D& b) { return a += b; }
GridFn2D operator-(GridFn2D a, const GridFn2D& b) { return a -= b; }
GridFn2D operator*(double a, GridFn2D g) { return g *= a; }

GridFn2D outer(const GridFn1D& h1, const GridFn1D& h2) {
    require_same_grid(h1.n(), h2.n(), "outer");
    GridFn2D g(h1.n());
    for (int i = 0; i <= h1.n(); ++i)
        for (int j = 0; j <= h1.n(); ++j) g(i, j) = h1[i] * h2[j];
    return g;
}

// ---- CellField2D ------------------------------------------------------------

CellField2D::CellField2D(int n) : n_(n) {
    require_min_cells(n);
    values_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
}

CellField2D::CellField2D(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    require_min_cells(n);
    if (values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw DimensionError("CellField2D: wrong number of values");
}

// ---- 1D calculus ------------------------------------------------------------

std::vector<double> forward_slopes(const GridFn1D& h) {
    const int n = h.n();
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = n * (h[i + 1] - h[i]);
    return d;
}

double rkhs_inner1d(const GridFn1D& a, const GridFn1D& b) {
    require_same_grid(a.n(), b.n(), "rkhs_inner1d");
    a.require_h0("rkhs_inner1d");
    b.require_h0("rkhs_inner1d");
    const auto da = forward_slopes(a);
    const auto db = forward_slopes(b);
    double acc = 0.0;
    for (std::size_t k = 0; k < da.size(); ++k) acc += da[k] * db[k];
    return acc / a.n();
}

double rkhs_norm1d(const GridFn1D& h) { return std::sqrt(rkhs_inner1d(h, h)); }

std::vector<double> concave_measure_atoms(const GridFn1D& h) {
    const auto d = forward_slopes(h);
    std::vector<double> atoms(static_cast<std::size_t>(h.size()), 0.0);
    for (int i = 1; i < h.n(); ++i)
        atoms[static_cast<std::size_t>(i)] =
            d[static_cast<std::size_t>(i - 1)] - d[static_cast<std::size_t>(i)];
    return atoms;
}

double stieltjes_integral_1d(const GridFn1D& g, const GridFn1D& h_tilde, double tol) {
    require_same_grid(g.n(), h_tilde.n(), "stieltjes_integral_1d");
    const auto atoms = concave_measure_atoms(h_tilde);
    double acc = 0.0;
    for (int i = 0; i <= g.n(); ++i) {
        const double a = atoms[static_cast<std::size_t>(i)];
        if (a < -tol) {
            std::ostringstream os;
            os << "stieltjes_integral_1d: integrator is not concave at node " << i
               << " (slope increase " << -a << ")";
            throw DomainError(os.str());
        }
        acc += g[i] * a;
    }
    return acc;
}

// ---- 2D calculus ------------------------------------------------------------

CellField2D mixed_second_diff_unchecked(const GridFn2D& h) {
    const int n = h.n();
    const double scale = static_cast<double>(n) * n;
    CellField2D f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f(i, j) = scale * (h(i + 1, j + 1) - h(i + 1, j) - h(i, j + 1) + h(i, j));
    return f;
}

CellField2D mixed_second_diff(const GridFn2D& h) {
    h.require_h0("mixed_second_diff");
    return mixed_second_diff_unchecked(h);
}

GridFn2D cumulative_integral(const CellField2D& f) {
    const int n = f.n();
    const double inv = 1.0 / (static_cast<double>(n) * n);
    GridFn2D h(n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            h(i, j) = h(i - 1, j) + h(i, j - 1) - h(i - 1, j - 1) + f(i - 1, j - 1) * inv;
    return h;
}

double rkhs_inner(const GridFn2D& h1, const GridFn2D& h2) {
    require_same_grid(h1.n(), h2.n(), "rkhs_inner");
    const auto f1 = mixed_second_diff(h1);
    const auto f2 = mixed_second_diff(h2);
    double acc = 0.0;
    const auto a = f1.values();
    const auto b = f2.values();
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc / (static_cast<double>(h1.n()) * h1.n());
}

double rkhs_norm(const GridFn2D& h) { return std::sqrt(rkhs_inner(h, h)); }

GridFn2D node_measure(const CellField2D& f) {
    const int n = f.n();
    auto at = [&](int i, int j) {
        return f(std::clamp(i, 0, n - 1), std::clamp(j, 0, n - 1));
    };
    GridFn2D atoms(n);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            atoms(i, j) = at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1);
    return atoms;
}

double stieltjes_integral_2d(const GridFn2D& g, const CellField2D& f) {
    require_same_grid(g.n(), f.n(), "stieltjes_integral_2d");
    const auto atoms = node_measure(f);
    double acc = 0.0;
    const auto gv = g.values();
    const auto av = atoms.values();
    for (std::size_t k = 0; k < gv.size(); ++k) acc += gv[k] * av[k];
    return acc;
}

double corner_combination(const CellField2D& f) {
    const int m = f.n() - 1;
    return f(m, m) - f(m, 0) - f(0, m) + f(0, 0);
}

}  // namespace pillow
