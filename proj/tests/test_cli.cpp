#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"
#include "pillow/builtins.hpp"
#include "pillow/cli.hpp"
#include "pillow/csv_io.hpp"

using namespace pillow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "pillow_cli");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pillow_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("builtin trends") {
    const auto p = builtin_trend_1d("parabola", {}, 8);
    for (int i = 0; i <= 8; ++i) CHECK(p[i] == doctest::Approx(i / 8.0 * (1 - i / 8.0)));
    const auto tp = builtin_trend_2d("tent-product", {}, 8);
    CHECK(tp(4, 4) == 0.25);
    CHECK(tp(2, 4) == 0.125);
    const auto fv = builtin_trend_1d("four-vertex", {}, 4);
    CHECK(fv[2] == doctest::Approx(0.1));
    CHECK(fv[3] == doctest::Approx(0.5));
    const auto sk = builtin_trend_1d("skew-tent", {{"apex", 0.25}}, 8);
    CHECK(sk[2] == doctest::Approx(0.5));
    for (const auto& name : builtin_names_2d()) CHECK(builtin_trend_2d(name, {}, 9).vanishes_on_boundary());
    for (const auto& name : builtin_names_1d()) CHECK(builtin_trend_1d(name, {}, 9).vanishes_at_ends());
    CHECK_THROWS_AS(builtin_trend_2d("no-such-thing", {}, 8), DomainError);
    CHECK_THROWS_AS(builtin_trend_1d("tent-product", {}, 8), DomainError);
    CHECK_THROWS_AS(builtin_trend_1d("tent", {{"apex", 0.2}}, 8), DomainError);
}

TEST_CASE("surface specs") {
    CHECK(resolve_surface("zero", 4, false).max_abs() == 0.0);
    CHECK(resolve_surface("const:0.5", 4, true)(0, 0) == 0.5);
    const auto pr = resolve_surface("product:tent*parabola", 8, false);
    CHECK(pr(4, 4) == doctest::Approx(0.5 * 0.25));
    const auto sc = resolve_surface("builtin:tent-product,scale=2", 8, false);
    CHECK(sc(4, 4) == 0.5);
    const auto off = resolve_surface("builtin:parabola-product,offset=0.3", 8, true);
    CHECK(off(0, 0) == doctest::Approx(0.3));
    CHECK_THROWS_AS(resolve_surface("builtin:parabola-product,offset=0.3", 8, false), DomainError);
    CHECK_THROWS_AS(resolve_surface("nonsense", 8, false), DomainError);
}

TEST_CASE("project reports the closed-form norm") {
    const auto r = invoke({"project", "--trend", "builtin:parabola-product", "--n", "64"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(j.at("projection").at("norm2").get<double>() - 1.0 / 9) <= 1e-3);
    CHECK(j.at("verification").at("all_pass").get<bool>());
}

TEST_CASE("estimate is reproducible byte for byte") {
    const auto a = scratch("est_a"), b = scratch("est_b");
    for (const auto& dir : {a, b}) {
        const auto r = invoke({"estimate", "--trend", "zero", "--boundary", "const:0.5", "--n", "16", "--paths",
                               "100000", "--seed", "7", "--out", dir.string()});
        REQUIRE(r.code == 0);
    }
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    const auto m = json::parse(slurp(a / "manifest.json"));
    CHECK(m.at("seed") == 7);
    CHECK(m.at("config_hash").get<std::string>().size() == 16u);
    CHECK(m.at("version") == kVersion);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("reconcile the tent product") {
    const auto r = invoke({"reconcile", "--trend", "builtin:tent-product", "--boundary", "const:0.5"});
    REQUIRE(r.code == 0);
    const auto b = json::parse(r.out).at("bounds");
    const double psi = b.at("psi_hat").at("p_hat").get<double>();
    const double se = b.at("psi_hat").at("std_err").get<double>();
    CHECK(b.at("exp_lower").get<double>() <= psi + 3 * se);
    CHECK(psi <= b.at("exp_upper").get<double>() + 3 * se);
    CHECK(b.at("shift_lower").get<double>() <= psi + 3 * se);
    CHECK(psi <= b.at("shift_upper").get<double>() + 3 * se);
    CHECK(b.at("all_pass").get<bool>());
}

TEST_CASE("table mode") {
    const auto r = invoke({"bound", "--trend", "builtin:tent-product,scale=0.5", "--n", "8", "--paths", "1000",
                           "--table"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("shift_lower") != std::string::npos);
    CHECK(r.out.find("exp_upper") != std::string::npos);
}

TEST_CASE("reconcile consumes a prior run manifest") {
    const auto dir = scratch("prior");
    REQUIRE(invoke({"bound", "--trend", "builtin:tent-product,scale=0.5", "--n", "8", "--paths", "2000", "--out",
                    dir.string()})
                .code == 0);
    const auto r = invoke({"reconcile", "--config", (dir / "manifest.json").string()});
    REQUIRE(r.code == 0);
    const auto b = json::parse(r.out).at("bounds");
    CHECK(b.at("psi0_hat").at("n_paths") == 2000);
    CHECK(b.at("norm_h_low").get<double>() == doctest::Approx(0.5));
    fs::remove_all(dir);
}

TEST_CASE("config file with flag override") {
    const auto cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"n": 8, "paths": 1000, "seed": 3, "trend": "builtin:tent-product"})";
    const auto r = invoke({"estimate", "--config", cfg.string(), "--seed", "4"});
    REQUIRE(r.code == 0);
    const auto e = json::parse(r.out).at("estimate");
    CHECK(e.at("seed") == 4);
    CHECK(e.at("n_grid") == 8);
    CHECK(e.at("n_paths") == 1000);
    fs::remove(cfg);
}

TEST_CASE("sweep writes a plot-ready table") {
    const auto dir = scratch("sweep");
    const auto r = invoke({"sweep", "--trend", "builtin:tent-product", "--n", "8", "--paths", "2000", "--gammas",
                           "1,2", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("gamma,log_psi,rate,remainder,std_err\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    fs::remove_all(dir);
}

TEST_CASE("majorant command") {
    const auto r = invoke({"majorant", "--trend", "four-vertex", "--n", "4"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out).at("majorant");
    CHECK(j.at("knots") == json::array({0, 3, 4}));
}

TEST_CASE("errors exit 2 with JSON and leave no output") {
    const auto dir = scratch("bad");
    auto r = invoke({"project", "--trend", "builtin:no-such", "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err).at("error").at("type") == "domain_error");
    CHECK_FALSE(fs::exists(dir));

    const auto csv = scratch("bad.csv");
    std::ofstream(csv) << "n=4\n1,2\n";
    r = invoke({"project", "--trend", "csv:" + csv.string(), "--n", "4", "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err).contains("error"));
    CHECK_FALSE(fs::exists(dir));

    std::ofstream(csv) << "n=4\n0,0,0,0,0\n0,1,1,1,0\n0,1,1,1,0\n0,1,1,1,0\n0,0,0,0,0\n";
    r = invoke({"project", "--trend", "csv:" + csv.string(), "--n", "8"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err).at("error").at("type") == "dimension_error");
    r = invoke({"project", "--trend", "csv:" + csv.string(), "--n", "4"});
    CHECK(r.code == 0);
    fs::remove(csv);

    r = invoke({"frobnicate"});
    CHECK(r.code == 2);
    r = invoke({"bound", "--boundary", "const:0.5", "--lower", "const:0.9"});
    CHECK(r.code == 2);
}

TEST_CASE("the installed binary follows the exit-code contract") {
    const std::string bin = PILLOW_CLI_PATH;
    int status = std::system((bin + " project --trend builtin:tent-product --n 8 > /dev/null").c_str());
    CHECK(WEXITSTATUS(status) == 0);
    status = std::system((bin + " project --trend builtin:bogus 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(status) == 2);
}

}  // TEST_SUITE
