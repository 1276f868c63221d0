#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "pillow/builtins.hpp"
#include "pillow/csv_io.hpp"
#include "pillow/grid.hpp"

using namespace pillow;
using doctest::Approx;

namespace {

GridFn1D parabola(int n) { return GridFn1D::sample(n, [](double s) { return s * (1 - s); }); }
GridFn1D tent(int n) { return GridFn1D::sample(n, [](double s) { return std::min(s, 1 - s); }); }

}  // namespace

TEST_SUITE("gridfn") {

TEST_CASE("grids need at least two cells") {
    CHECK_THROWS_AS(GridFn1D(1), DomainError);
    CHECK_THROWS_AS(GridFn2D(1), DomainError);
    CHECK_NOTHROW(GridFn2D(2));
}

TEST_CASE("mixed difference of zero is zero") {
    const CellField2D f = mixed_second_diff(GridFn2D(8));
    for (double v : f.values()) CHECK(v == 0.0);
}

TEST_CASE("mixed difference of the parabola product at n=2") {
    // only interior node (1,1) carries 1/16; each cell sees it once with sign ±, times n² = 4
    const GridFn2D h = outer(parabola(2), parabola(2));
    REQUIRE(h(1, 1) == 1.0 / 16);
    const CellField2D f = mixed_second_diff(h);
    CHECK(f(0, 0) == 0.25);
    CHECK(f(0, 1) == -0.25);
    CHECK(f(1, 0) == -0.25);
    CHECK(f(1, 1) == 0.25);
}

TEST_CASE("mixed difference separates over outer products") {
    std::mt19937_64 rng(3);
    const auto h1 = testing::random_h0_1d(12, rng, -1, 1);
    const auto h2 = testing::random_h0_1d(12, rng, -1, 1);
    const CellField2D f = mixed_second_diff(outer(h1, h2));
    const auto d1 = forward_slopes(h1), d2 = forward_slopes(h2);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) CHECK(f(i, j) == Approx(d1[i] * d2[j]).epsilon(1e-12));
}

TEST_CASE("mixed difference rejects a nonzero boundary and names the node") {
    GridFn2D h(4);
    h(0, 2) = 0.1;
    try {
        (void)mixed_second_diff(h);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("(0,2)") != std::string::npos);
    }
}

TEST_CASE("cumulative integral reconstructs the function") {
    std::mt19937_64 rng(11);
    for (int n : {2, 5, 16, 33}) {
        const GridFn2D h = testing::random_h0(n, rng);
        const GridFn2D back = cumulative_integral(mixed_second_diff(h));
        CHECK(testing::max_abs_diff(h, back) <= 1e-10 * std::max(1.0, h.max_abs()));
    }
}

TEST_CASE("RKHS norms of the closed-form examples") {
    const GridFn2D p = outer(parabola(256), parabola(256));
    CHECK(std::abs(rkhs_inner(p, p) - 1.0 / 9) <= 1e-3);
    CHECK(rkhs_inner(p, GridFn2D(256)) == 0.0);
    CHECK(std::abs(rkhs_norm1d(parabola(256)) * rkhs_norm1d(parabola(256)) - 1.0 / 3) <= 1e-3);
    for (int n : {2, 4, 64, 256}) {
        CHECK(rkhs_norm1d(tent(n)) == 1.0);
        const GridFn2D t = outer(tent(n), tent(n));
        CHECK(rkhs_inner(t, t) == 1.0);
    }
    // other even n: node positions i/n are rounded, so only to a few ulps
    for (int n : {6, 10, 30, 100}) {
        const GridFn2D t = outer(tent(n), tent(n));
        CHECK(std::abs(rkhs_inner(t, t) - 1.0) <= 1e-12);
    }
    CHECK(rkhs_norm1d(GridFn1D(8)) == 0.0);
}

TEST_CASE("1D norm rejects nonzero endpoints") {
    GridFn1D h(4);
    h[4] = 0.5;
    CHECK_THROWS_AS(rkhs_norm1d(h), DomainError);
}

TEST_CASE("inner product factorizes over outer products") {
    std::mt19937_64 rng(5);
    const int n = 20;
    const auto h1 = testing::random_h0_1d(n, rng, -1, 1), h2 = testing::random_h0_1d(n, rng, -1, 1);
    const auto g1 = testing::random_h0_1d(n, rng, -1, 1), g2 = testing::random_h0_1d(n, rng, -1, 1);
    const double lhs = rkhs_inner(outer(h1, h2), outer(g1, g2));
    CHECK(lhs == Approx(rkhs_inner1d(h1, g1) * rkhs_inner1d(h2, g2)).epsilon(1e-10));
    const double nn = rkhs_norm1d(h1) * rkhs_norm1d(h2);
    CHECK(rkhs_inner(outer(h1, h2), outer(h1, h2)) == Approx(nn * nn).epsilon(1e-10));
}

TEST_CASE("inner product is bilinear and symmetric") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6 + trial;
        const GridFn2D h = testing::random_h0(n, rng), g = testing::random_h0(n, rng),
                       k = testing::random_h0(n, rng);
        const double a = 0.3 + trial, b = -1.7;
        const double scale = rkhs_norm(k) * (a * rkhs_norm(h) + std::abs(b) * rkhs_norm(g));
        CHECK(std::abs(rkhs_inner(a * h + b * g, k) - a * rkhs_inner(h, k) - b * rkhs_inner(g, k)) <=
              1e-10 * scale);
        CHECK(rkhs_inner(h, g) == rkhs_inner(g, h));
    }
}

TEST_CASE("grid mismatch is a dimension error") {
    CHECK_THROWS_AS(rkhs_inner(GridFn2D(4), GridFn2D(5)), DimensionError);
    CHECK_THROWS_AS(stieltjes_integral_2d(GridFn2D(4), CellField2D(5)), DimensionError);
    CHECK_THROWS_AS(rkhs_inner1d(GridFn1D(4), GridFn1D(6)), DimensionError);
}

TEST_CASE("constant cell field generates no measure") {
    std::vector<double> v(36, 2.5);
    const CellField2D f(6, v);
    std::mt19937_64 rng(1);
    GridFn2D g = testing::random_h0(6, rng);
    for (int i = 0; i <= 6; ++i) g(0, i) = g(i, 6) = 1.0 + i;  // need not vanish
    CHECK(stieltjes_integral_2d(g, f) == 0.0);
}

TEST_CASE("tent product measure is a single atom of mass 4") {
    for (int n : {2, 8, 32}) {
        const CellField2D f = mixed_second_diff(outer(tent(n), tent(n)));
        const GridFn2D atoms = node_measure(f);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                CHECK(atoms(i, j) == (i == n / 2 && j == n / 2 ? 4.0 : 0.0));
        CHECK(stieltjes_integral_2d(testing::constant(n, 1.0), f) == 4.0);
        CHECK(stieltjes_integral_2d(testing::constant(n, -0.7), f) == Approx(-2.8));
        CHECK(corner_combination(f) == 4.0);
    }
}

TEST_CASE("Stieltjes integral is linear and matches discrete integration by parts") {
    std::mt19937_64 rng(23);
    for (int n : {3, 9, 24}) {
        const GridFn2D g = testing::random_h0(n, rng);
        const CellField2D f = mixed_second_diff(testing::random_h0(n, rng));
        const CellField2D dg = mixed_second_diff(g);
        double direct = 0.0;
        for (std::size_t k = 0; k < f.values().size(); ++k) direct += dg.values()[k] * f.values()[k];
        direct /= double(n) * n;
        const double ibp = stieltjes_integral_2d(g, f);
        CHECK(ibp == Approx(direct).epsilon(1e-10));

        const GridFn2D g2 = testing::random_h0(n, rng);
        CHECK(stieltjes_integral_2d(2.0 * g - g2, f) ==
              Approx(2.0 * ibp - stieltjes_integral_2d(g2, f)).epsilon(1e-10));
    }
}

TEST_CASE("1D Stieltjes integral") {
    const int n = 256;
    const GridFn1D one = GridFn1D::sample(n, [](double) { return 1.0; });
    const double c = 0.7;
    const double par = stieltjes_integral_1d(c * one, parabola(n));
    CHECK(std::abs(par - 2 * c) <= 2 * c * 2.0 / n);
    CHECK(stieltjes_integral_1d(one, tent(n)) == 2.0);
    CHECK(stieltjes_integral_1d(GridFn1D::sample(n, [](double s) { return s; }), tent(n)) == 1.0);
    const GridFn1D fv = builtin_trend_1d("four-vertex", {}, 8);
    CHECK_THROWS_AS(stieltjes_integral_1d(GridFn1D::sample(8, [](double) { return 1.0; }), fv),
                    DomainError);
}

TEST_CASE("CSV round trip is value exact") {
    std::mt19937_64 rng(31);
    GridFn2D g = testing::random_h0(7, rng);
    g(0, 0) = 1.0 / 3.0;
    g(7, 3) = -1e-300;
    std::stringstream ss;
    write_csv(ss, g);
    CHECK(ss.str().rfind("n=7\n", 0) == 0);
    const GridFn2D back = read_csv_2d(ss);
    CHECK(back == g);

    const GridFn1D h = testing::random_h0_1d(5, rng);
    std::stringstream s1;
    write_csv(s1, h);
    const GridFn1D h_back = read_csv_1d(s1);
    for (int i = 0; i <= 5; ++i) CHECK(h_back[i] == h[i]);
}

TEST_CASE("malformed CSV is rejected") {
    for (const char* text : {"", "n=2\n1,2,3\n", "n=x\n", "n=2\n0,0,0\n0,abc,0\n0,0,0\n",
                             "n=2\n0,0\n0,0,0\n0,0,0\n"}) {
        std::stringstream ss(text);
        CHECK_THROWS_AS(read_csv_2d(ss), DomainError);
    }
}

}  // TEST_SUITE
