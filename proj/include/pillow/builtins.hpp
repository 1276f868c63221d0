#pragma once

// Named test functions shared by the CLI, the tests and the acceptance suite.

#include <map>
#include <string>
#include <vector>

#include "pillow/grid.hpp"

namespace pillow {

using Params = std::map<std::string, double>;

/// 1D names: parabola, tent, skew-tent, four-vertex. Parameters: scale (all),
/// apex (skew-tent, default 0.3).
GridFn1D builtin_trend_1d(const std::string& name, const Params& params, int n);

/// 2D names: parabola-product, tent-product, negative-bump, mixed-sign, plus
/// NAME for any 1D name (the product NAME ⊗ NAME). Parameter: scale.
GridFn2D builtin_trend_2d(const std::string& name, const Params& params, int n);

std::vector<std::string> builtin_names_1d();
std::vector<std::string> builtin_names_2d();

}  // namespace pillow
