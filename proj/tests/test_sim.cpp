#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "pillow/csv_io.hpp"
#include "pillow/pillow_sim.hpp"
#include "pillow/rng.hpp"

using namespace pillow;
using doctest::Approx;

namespace {

struct Moments {
    double mean = 0.0, se = 0.0;
};

// mean of x_k and its standard error
Moments moments(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    double s2 = 0.0;
    for (double v : x) s2 += (v - m) * (v - m);
    s2 /= (x.size() - 1);
    return {m, std::sqrt(s2 / x.size())};
}

Moments covariance(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = moments(a).mean, mb = moments(b).mean;
    std::vector<double> prod(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) prod[k] = (a[k] - ma) * (b[k] - mb);
    return moments(prod);
}

}  // namespace

TEST_SUITE("pillow_sim") {

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::encrypt({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::encrypt({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::encrypt({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms stay inside (0,1]") {
    CHECK(to_unit_open_closed(0, 0) > 0.0);
    CHECK(to_unit_open_closed(0xffffffff, 0xffffffff) == 1.0);
}

TEST_CASE("Gaussian field is addressable and fill agrees with point access") {
    GaussianField f({42, 3});
    std::vector<double> z(7);
    f.fill(9, z.data(), 7);
    for (std::uint32_t c = 0; c < 7; ++c) CHECK(z[c] == f.normal(9, c));
    CHECK(f.normal(9, 0) != f.normal(10, 0));
    CHECK(GaussianField({42, 4}).normal(9, 0) != f.normal(9, 0));
}

TEST_CASE("standard normal moments") {
    GaussianField f({1, 0});
    std::vector<double> x, x2;
    for (std::uint64_t p = 0; p < 50000; ++p) {
        const double z = f.normal(p, 5);
        x.push_back(z);
        x2.push_back(z * z);
    }
    const auto m = moments(x), v = moments(x2);
    CHECK(std::abs(m.mean) <= 4 * m.se);
    CHECK(std::abs(v.mean - 1.0) <= 4 * v.se);
}

TEST_CASE("covariance kernels") {
    CHECK(pillow_cov(0.5, 0.5, 0.5, 0.5) == 1.0 / 16);
    CHECK(pillow_cov(0.0, 0.3, 0.6, 0.2) == 0.0);
    CHECK(pillow_cov(0.25, 0.5, 0.5, 0.5) == 1.0 / 32);
    CHECK(bridge_cov(0.3, 0.7) == Approx(0.3 - 0.21));
    CHECK_THROWS_AS(pillow_cov(1.2, 0.5, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(pillow_cov(0.5, -0.1, 0.5, 0.5), DomainError);
}

TEST_CASE("sheet moments") {
    const int n = 4, N = 100000;
    PillowSampler s(n, {5, 0});
    GridFn2D w(n);
    std::vector<double> w11, w11sq, whalf;
    for (int p = 0; p < N; ++p) {
        s.sheet(p, w);
        for (int k = 0; k <= n; ++k) {
            REQUIRE(w(0, k) == 0.0);
            REQUIRE(w(k, 0) == 0.0);
        }
        w11.push_back(w(n, n));
        w11sq.push_back(w(n, n) * w(n, n));
        whalf.push_back(w(n / 2, n / 2));
    }
    const auto var = moments(w11sq);
    CHECK(std::abs(var.mean - 1.0) <= 3 * std::sqrt(2.0 / N));
    const auto cov = covariance(whalf, w11);
    CHECK(std::abs(cov.mean - 0.25) <= 3 * cov.se);
}

TEST_CASE("pillow moments and pinning") {
    const int n = 4, N = 100000;
    PillowSampler s(n, {6, 0});
    GridFn2D b(n);
    std::vector<double> center, quarter;
    for (int p = 0; p < N; ++p) {
        s.pillow(p, b);
        for (int k = 0; k <= n; ++k) {
            REQUIRE(b(0, k) == 0.0);
            REQUIRE(b(n, k) == 0.0);
            REQUIRE(b(k, 0) == 0.0);
            REQUIRE(b(k, n) == 0.0);
        }
        center.push_back(b(2, 2));
        quarter.push_back(b(1, 2));
    }
    const auto var = covariance(center, center);
    CHECK(std::abs(var.mean - 1.0 / 16) <= 3 * var.se);
    const auto cov = covariance(quarter, center);
    CHECK(std::abs(cov.mean - 1.0 / 32) <= 3 * cov.se);
}

TEST_CASE("batches are reproducible and streams are uncorrelated") {
    const auto a = sample_pillow_batch(8, 2000, 77, 0);
    const auto b = sample_pillow_batch(8, 2000, 77, 0);
    const auto c = sample_pillow_batch(8, 2000, 77, 1);
    REQUIRE(a.paths.size() == 2000u);
    for (std::size_t k = 0; k < a.paths.size(); ++k) REQUIRE(a.paths[k] == b.paths[k]);
    CHECK(sample_pillow(8, {77, 0}, 13) == a.paths[13]);

    const int probes[10][2] = {{1, 1}, {1, 4}, {2, 6}, {3, 3}, {4, 4}, {4, 7}, {5, 2}, {6, 5}, {7, 1}, {7, 7}};
    for (const auto& pr : probes) {
        std::vector<double> x, y;
        for (std::size_t k = 0; k < a.paths.size(); ++k) {
            x.push_back(a.paths[k](pr[0], pr[1]));
            y.push_back(c.paths[k](pr[0], pr[1]));
        }
        const double cxy = covariance(x, y).mean;
        const double rho = cxy / std::sqrt(covariance(x, x).mean * covariance(y, y).mean);
        CHECK(std::abs(rho) < 4.0 / std::sqrt(2000.0));
    }
}

TEST_CASE("batch dump") {
    const auto dir = std::filesystem::temp_directory_path() / "pillow_batch_test";
    std::filesystem::remove_all(dir);
    const auto batch = sample_pillow_batch(4, 3, 9, 2);
    write_batch(dir, batch);
    CHECK(read_csv_2d(dir / "path_2.csv") == batch.paths[2]);
    std::ifstream f(dir / "manifest.json");
    const auto j = nlohmann::json::parse(f);
    CHECK(j.at("seed") == 9);
    CHECK(j.at("stream_id") == 2);
    CHECK(j.at("n") == 4);
    CHECK(j.at("count") == 3);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
