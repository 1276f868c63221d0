#pragma once

// Batch front end. One command per process; artifacts go to a run directory
// (manifest.json, report.json, optional sweep.csv) or to stdout without --out.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pillow/grid.hpp"

namespace pillow {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string command;
    int n = 16;
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 0;
    std::string trend = "zero";
    std::string boundary = "const:0.5";
    std::string lower;  ///< empty: the negated boundary
    std::vector<double> gammas{2.0, 4.0, 6.0, 8.0};
    std::string out;
    double tol = 1e-8;
    int blocks = 64;
    bool relaxed = false;
    bool table = false;
};

nlohmann::ordered_json to_json(const RunConfig& c);
/// Accepts either a bare config object or a manifest.json carrying one under "config".
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Surface specs: zero | const:c | builtin:NAME[,key=value...] | product:A*B | csv:PATH,
/// where A and B are 1D specs NAME[,key=value...] or csv:PATH. Boundary builtins
/// also take offset=c.
GridFn2D resolve_surface(const std::string& spec, int n, bool boundary);
/// 1D specs: builtin:NAME[,key=value...] | NAME[,...] | csv:PATH.
GridFn1D resolve_curve(const std::string& spec, int n);

/// Runs one command. Returns 0 on success and 2 on a domain, dimension, solver
/// or I/O error, in which case a JSON error object is written to err and no
/// output directory is created.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// argv front end (CLI11).
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pillow
