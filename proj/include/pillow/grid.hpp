#pragma once

// Grid functions on [0,1] and [0,1]^2 and the discrete RKHS calculus on them.
//
// A grid with n cells per axis has nodes s_i = i/n, i = 0..n. Derivatives are
// forward differences scaled by n (1D) or four-node mixed differences scaled
// by n^2 (2D), so the discrete inner products below are the exact RKHS inner
// products of the piecewise-linear / bilinear interpolants.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pillow/errors.hpp"

namespace pillow {

class GridFn1D {
public:
    explicit GridFn1D(int n);
    GridFn1D(int n, std::vector<double> values);

    template <class F>
    static GridFn1D sample(int n, F&& f) {
        GridFn1D g(n);
        for (int i = 0; i <= n; ++i) g.values_[i] = f(static_cast<double>(i) / n);
        return g;
    }

    int n() const noexcept { return n_; }
    int size() const noexcept { return n_ + 1; }
    double node(int i) const noexcept { return static_cast<double>(i) / n_; }

    double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Membership in the bridge RKHS: both endpoints are exactly zero.
    bool vanishes_at_ends() const noexcept;
    /// Throws DomainError naming the offending endpoint.
    void require_h0(std::string_view what) const;

    GridFn1D& operator+=(const GridFn1D& o);
    GridFn1D& operator-=(const GridFn1D& o);
    GridFn1D& operator*=(double a);

private:
    int n_;
    std::vector<double> values_;
};

GridFn1D operator+(GridFn1D a, const GridFn1D& b);
GridFn1D operator-(GridFn1D a, const GridFn1D& b);
GridFn1D operator*(double a, GridFn1D g);

class GridFn2D {
public:
    explicit GridFn2D(int n);
    GridFn2D(int n, std::vector<double> values);

    template <class F>
    static GridFn2D sample(int n, F&& f) {
        GridFn2D g(n);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                g(i, j) = f(static_cast<double>(i) / n, static_cast<double>(j) / n);
        return g;
    }

    int n() const noexcept { return n_; }
    int side() const noexcept { return n_ + 1; }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) +
               static_cast<std::size_t>(j);
    }

    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool on_boundary(int i, int j) const noexcept {
        return i == 0 || j == 0 || i == n_ || j == n_;
    }
    /// Membership in the pillow RKHS: zero on all four edges.
    bool vanishes_on_boundary() const noexcept;
    /// Throws DomainError naming the first boundary node with a nonzero value.
    void require_h0(std::string_view what) const;

    double max_abs() const noexcept;

    GridFn2D& operator+=(const GridFn2D& o);
    GridFn2D& operator-=(const GridFn2D& o);
    GridFn2D& operator*=(double a);

    bool operator==(const GridFn2D&) const = default;

private:
    int n_;
    std::vector<double> values_;
};

GridFn2D operator+(GridFn2D a, const GridFn2D& b);
GridFn2D operator-(GridFn2D a, const GridFn2D& b);
GridFn2D operator*(double a, GridFn2D g);

/// (h1 ⊗ h2)(s_i, t_j) = h1(s_i) h2(t_j).
GridFn2D outer(const GridFn1D& h1, const GridFn1D& h2);

/// One value per cell [i/n,(i+1)/n] x [j/n,(j+1)/n]; represents a mixed derivative.
class CellField2D {
public:
    explicit CellField2D(int n);
    CellField2D(int n, std::vector<double> values);

    int n() const noexcept { return n_; }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j);
    }
    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }

    std::span<const double> values() const noexcept { return values_; }

private:
    int n_;
    std::vector<double> values_;
};

void require_same_grid(int n1, int n2, std::string_view what);

// ---- 1D calculus ------------------------------------------------------------

/// Cell slopes n·(h_{i+1} − h_i), i = 0..n−1.
std::vector<double> forward_slopes(const GridFn1D& h);

double rkhs_inner1d(const GridFn1D& a, const GridFn1D& b);
double rkhs_norm1d(const GridFn1D& h);

/// Point masses of the measure d(−h'), one per node. Interior node i carries
/// slope_{i−1} − slope_i; the endpoints carry nothing (slopes are extended as
/// constants outside [0,1]).
std::vector<double> concave_measure_atoms(const GridFn1D& h);

/// ∫ g d(−h̃'). Rejects h̃ whose measure has an atom below −tol.
double stieltjes_integral_1d(const GridFn1D& g, const GridFn1D& h_tilde, double tol = 1e-8);

// ---- 2D calculus ------------------------------------------------------------

/// h''(cell i,j) = n²·(h_{i+1,j+1} − h_{i+1,j} − h_{i,j+1} + h_{i,j}). Requires h ∈ H₂⁰.
CellField2D mixed_second_diff(const GridFn2D& h);

/// Same stencil without the boundary check; used for sample paths.
CellField2D mixed_second_diff_unchecked(const GridFn2D& h);

/// Inverse of mixed_second_diff: h(s_i,t_j) = Σ_{a<i,b<j} f_ab / n².
GridFn2D cumulative_integral(const CellField2D& f);

double rkhs_inner(const GridFn2D& h1, const GridFn2D& h2);
double rkhs_norm(const GridFn2D& h);

/// Node atoms of the signed measure generated by the cell field f. The field
/// is extended as a constant beyond [0,1]^2, so atoms sit at interior nodes:
/// atom(i,j) = f_{i,j} − f_{i−1,j} − f_{i,j−1} + f_{i−1,j−1}.
GridFn2D node_measure(const CellField2D& f);

/// Σ_nodes g · atom. g need not vanish on the boundary.
double stieltjes_integral_2d(const GridFn2D& g, const CellField2D& f);

/// f(n−1,n−1) − f(n−1,0) − f(0,n−1) + f(0,0): the corner combination
/// h''(1,1) − h''(1,0) − h''(0,1) + h''(0,0) of left/right limits at the corners.
double corner_combination(const CellField2D& f);

}  // namespace pillow
