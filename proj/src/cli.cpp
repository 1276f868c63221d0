#include "pillow/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "pillow/bounds.hpp"
#include "pillow/builtins.hpp"
#include "pillow/csv_io.hpp"
#include "pillow/estimator.hpp"
#include "pillow/json_io.hpp"
#include "pillow/majorant.hpp"

namespace pillow {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kCommands{"estimate", "bound", "project", "majorant", "sweep", "reconcile"};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_real(const std::string& s, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError(ctx + ": '" + s + "' is not a number");
}

struct NamedSpec {
    std::string name;
    Params params;
};

NamedSpec parse_named(const std::string& body, const std::string& ctx) {
    const auto parts = split(body, ',');
    if (parts.empty() || parts[0].empty()) throw DomainError(ctx + ": missing name");
    NamedSpec s{parts[0], {}};
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const auto eq = parts[k].find('=');
        if (eq == std::string::npos) throw DomainError(ctx + ": expected key=value, got '" + parts[k] + "'");
        s.params[parts[k].substr(0, eq)] = parse_real(parts[k].substr(eq + 1), ctx);
    }
    return s;
}

bool starts_with(const std::string& s, const char* prefix, std::string& rest) {
    const std::string p(prefix);
    if (s.rfind(p, 0) != 0) return false;
    rest = s.substr(p.size());
    return true;
}

void check_grid(int got, int want, const std::string& what) {
    if (got != want) {
        std::ostringstream os;
        os << what << " has n=" << got << " but the run uses n=" << want;
        throw DimensionError(os.str());
    }
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

void print_table(std::ostream& out, const ordered_json& report) {
    const auto& b = report.at("bounds");
    out << std::left << std::setw(24) << "quantity" << "value\n";
    for (const char* key : {"norm_h", "norm_h_low", "norm_h_up", "theta", "shift_lower", "shift_upper",
                            "diff_lower", "diff_upper", "coarse_diff", "exp_lower", "exp_upper",
                            "stieltjes_I", "corner_term", "constant_upper"}) {
        out << std::setw(24) << key << b.at(key).dump() << '\n';
    }
    out << std::setw(24) << "psi0_hat" << b.at("psi0_hat").at("p_hat").dump() << '\n';
    out << std::setw(24) << "psi0_upper" << b.at("psi0_upper").at("value").dump() << '\n';
    if (!b.at("psi_hat").is_null())
        out << std::setw(24) << "psi_hat" << b.at("psi_hat").at("p_hat").dump() << '\n';
    for (const auto& c : b.at("checks"))
        out << std::setw(24) << c.at("name").get<std::string>() << (c.at("pass").get<bool>() ? "ok" : "FAIL") << '\n';
}

ordered_json error_json(const char* type, const std::string& msg) {
    ordered_json j;
    j["error"] = {{"type", type}, {"message", msg}};
    return j;
}

}  // namespace

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["command"] = c.command;
    j["n"] = c.n;
    j["paths"] = c.n_paths;
    j["seed"] = c.seed;
    j["trend"] = c.trend;
    j["boundary"] = c.boundary;
    j["lower"] = c.lower;
    j["gammas"] = c.gammas;
    j["tol"] = c.tol;
    j["blocks"] = c.blocks;
    j["relaxed"] = c.relaxed;
    return j;
}

RunConfig config_from_json(const nlohmann::json& in, RunConfig c) {
    const nlohmann::json& j = in.contains("config") ? in.at("config") : in;
    if (!j.is_object()) throw DomainError("config: expected a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k == "command") c.command = v.get<std::string>();
        else if (k == "n") c.n = v.get<int>();
        else if (k == "paths") c.n_paths = v.get<std::int64_t>();
        else if (k == "seed") c.seed = v.get<std::uint64_t>();
        else if (k == "trend") c.trend = v.get<std::string>();
        else if (k == "boundary") c.boundary = v.get<std::string>();
        else if (k == "lower") c.lower = v.get<std::string>();
        else if (k == "gammas") c.gammas = v.get<std::vector<double>>();
        else if (k == "out") c.out = v.get<std::string>();
        else if (k == "tol") c.tol = v.get<double>();
        else if (k == "blocks") c.blocks = v.get<int>();
        else if (k == "relaxed") c.relaxed = v.get<bool>();
        else throw DomainError("config: unknown key '" + k + "'");
    }
    return c;
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

GridFn1D resolve_curve(const std::string& spec, int n) {
    std::string rest;
    if (starts_with(spec, "csv:", rest)) {
        GridFn1D g = read_csv_1d(fs::path(rest));
        check_grid(g.n(), n, "curve " + rest);
        return g;
    }
    if (!starts_with(spec, "builtin:", rest)) rest = spec;
    const NamedSpec s = parse_named(rest, "curve spec");
    return builtin_trend_1d(s.name, s.params, n);
}

GridFn2D resolve_surface(const std::string& spec, int n, bool boundary) {
    std::string rest;
    if (spec == "zero") return GridFn2D(n);
    if (starts_with(spec, "const:", rest)) {
        const double c = parse_real(rest, "const spec");
        GridFn2D g(n);
        for (double& v : g.values()) v = c;
        return g;
    }
    if (starts_with(spec, "csv:", rest)) {
        GridFn2D g = read_csv_2d(fs::path(rest));
        check_grid(g.n(), n, "surface " + rest);
        return g;
    }
    if (starts_with(spec, "product:", rest)) {
        const auto factors = split(rest, '*');
        if (factors.size() != 2) throw DomainError("product spec needs exactly two factors A*B");
        return outer(resolve_curve(factors[0], n), resolve_curve(factors[1], n));
    }
    if (starts_with(spec, "builtin:", rest)) {
        NamedSpec s = parse_named(rest, "builtin spec");
        double offset = 0.0;
        if (auto it = s.params.find("offset"); it != s.params.end()) {
            if (!boundary) throw DomainError("offset is only valid for boundaries");
            offset = it->second;
            s.params.erase(it);
        }
        GridFn2D g = builtin_trend_2d(s.name, s.params, n);
        for (double& v : g.values()) v += offset;
        return g;
    }
    throw DomainError("unrecognised surface spec '" + spec + "'");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!kCommands.count(cfg.command)) throw DomainError("unknown command '" + cfg.command + "'");
        if (cfg.n < 2) throw DomainError("n must be at least 2");
        if (cfg.n_paths < 100) throw DomainError("paths must be at least 100");
        if (cfg.blocks < 1) throw DomainError("blocks must be positive");
        if (!(cfg.tol > 0.0)) throw DomainError("tol must be positive");

        SolverOptions solver;
        solver.tol = cfg.tol;
        McOptions mc;
        mc.n_paths = cfg.n_paths;
        mc.seed = cfg.seed;
        mc.blocks = cfg.blocks;

        ordered_json report;
        report["command"] = cfg.command;
        report["config_hash"] = config_hash(cfg);
        std::optional<std::string> sweep_table;

        if (cfg.command == "majorant") {
            const GridFn1D h = resolve_curve(cfg.trend, cfg.n);
            h.require_h0("trend");
            report["majorant"] = to_json(least_concave_majorant(h));
        } else {
            const GridFn2D h = resolve_surface(cfg.trend, cfg.n, false);
            h.require_h0("trend");
            if (cfg.command == "project") {
                const ProjectionResult low = project_polar_cone(h, solver);
                const ProjectionResult up = project_W(h, solver);
                const double nh = rkhs_norm(h);
                report["norm_h"] = nh;
                report["norm2_h"] = nh * nh;
                report["projection"] = to_json(low);
                report["verification"] = to_json(verify_projection(h, low, cfg.tol));
                report["upper_projection"] = {{"norm", up.norm}, {"norm2", up.norm * up.norm},
                                              {"residual", up.residual}};
            } else {
                const GridFn2D u = resolve_surface(cfg.boundary, cfg.n, true);
                if (cfg.command == "estimate") {
                    report["estimate"] = to_json(estimate_direct(u, h, mc));
                } else if (cfg.command == "sweep") {
                    const SweepResult s = gamma_sweep(u, h, cfg.gammas, mc, solver);
                    report["sweep"] = to_json(s);
                    sweep_table = sweep_csv(s);
                } else {
                    const GridFn2D l = cfg.lower.empty() ? -1.0 * u : resolve_surface(cfg.lower, cfg.n, true);
                    BoundConfig bc;
                    bc.mc = mc;
                    bc.solver = solver;
                    bc.relaxed = cfg.relaxed;
                    bc.reconcile = cfg.command == "reconcile";
                    report["bounds"] = to_json(bound_report(u, h, l, bc));
                }
            }
        }

        ordered_json manifest;
        manifest["tool"] = "pillow_cli";
        manifest["version"] = kVersion;
        manifest["modules"] = {{"gridfn", kVersion}, {"majorant", kVersion}, {"pillow_sim", kVersion},
                               {"estimator", kVersion}, {"bounds", kVersion}, {"cli", kVersion}};
        manifest["config"] = to_json(cfg);
        manifest["config_hash"] = config_hash(cfg);
        manifest["seed"] = cfg.seed;
        manifest["blocks"] = cfg.blocks;
        manifest["files"] = sweep_table ? std::vector<std::string>{"report.json", "sweep.csv"}
                                        : std::vector<std::string>{"report.json"};
        report["manifest"] = {{"version", kVersion}, {"seed", cfg.seed}, {"blocks", cfg.blocks}};

        if (cfg.out.empty()) {
            if (cfg.table && report.contains("bounds")) print_table(out, report);
            else out << report.dump(2) << '\n';
            return 0;
        }
        const fs::path dest(cfg.out);
        fs::path tmp = dest;
        tmp += ".tmp-" + std::to_string(::getpid());
        fs::remove_all(tmp);
        fs::create_directories(tmp);
        try {
            write_file(tmp / "manifest.json", manifest.dump(2) + "\n");
            write_file(tmp / "report.json", report.dump(2) + "\n");
            if (sweep_table) write_file(tmp / "sweep.csv", *sweep_table);
            if (fs::exists(dest)) fs::remove_all(dest);
            fs::rename(tmp, dest);
        } catch (...) {
            std::error_code ec;
            fs::remove_all(tmp, ec);
            throw;
        }
        if (cfg.table && report.contains("bounds")) print_table(out, report);
        else out << dest.string() << '\n';
        return 0;
    } catch (const DomainError& e) {
        err << error_json("domain_error", e.what()).dump() << '\n';
    } catch (const DimensionError& e) {
        err << error_json("dimension_error", e.what()).dump() << '\n';
    } catch (const SolverError& e) {
        ordered_json j = error_json("solver_error", e.what());
        j["error"]["residual"] = e.residual();
        j["error"]["iterations"] = e.iterations();
        err << j.dump() << '\n';
    } catch (const nlohmann::json::exception& e) {
        err << error_json("config_error", e.what()).dump() << '\n';
    } catch (const std::runtime_error& e) {
        err << error_json("io_error", e.what()).dump() << '\n';
    }
    return 2;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary non-crossing probabilities of the Brownian pillow"};
    std::string command, config_path, trend, boundary, lower, out_dir;
    int n = 0, blocks = 0;
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::vector<double> gammas;
    bool relaxed = false, table = false;

    app.add_option("command", command, "estimate|bound|project|majorant|sweep|reconcile")->required();
    app.add_option("--config", config_path, "JSON config or a prior run's manifest.json");
    auto* o_n = app.add_option("--n", n, "cells per axis");
    auto* o_paths = app.add_option("--paths", paths, "Monte Carlo paths");
    auto* o_seed = app.add_option("--seed", seed, "RNG seed");
    auto* o_trend = app.add_option("--trend", trend, "trend spec");
    auto* o_boundary = app.add_option("--boundary", boundary, "boundary spec");
    auto* o_lower = app.add_option("--lower", lower, "lower boundary spec (default: negated boundary)");
    auto* o_gammas = app.add_option("--gammas", gammas, "comma list of sweep scales")->delimiter(',');
    auto* o_out = app.add_option("--out", out_dir, "run directory");
    auto* o_tol = app.add_option("--tol", tol, "solver tolerance");
    auto* o_blocks = app.add_option("--blocks", blocks, "Monte Carlo blocks");
    app.add_flag("--relaxed", relaxed, "replace the residual probability by 1");
    app.add_flag("--table", table, "print bounds as a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json("usage_error", e.what()).dump() << '\n';
        return 2;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw DomainError("cannot open config " + config_path);
            cfg = config_from_json(nlohmann::json::parse(f));
        }
    } catch (const std::exception& e) {
        err << error_json("config_error", e.what()).dump() << '\n';
        return 2;
    }
    cfg.command = command;
    if (o_n->count()) cfg.n = n;
    if (o_paths->count()) cfg.n_paths = paths;
    if (o_seed->count()) cfg.seed = seed;
    if (o_trend->count()) cfg.trend = trend;
    if (o_boundary->count()) cfg.boundary = boundary;
    if (o_lower->count()) cfg.lower = lower;
    if (o_gammas->count()) cfg.gammas = gammas;
    if (o_out->count()) cfg.out = out_dir;
    if (o_tol->count()) cfg.tol = tol;
    if (o_blocks->count()) cfg.blocks = blocks;
    if (relaxed) cfg.relaxed = true;
    cfg.table = table;
    return run(cfg, out, err);
}

}  // namespace pillow
