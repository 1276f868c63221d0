#pragma once

// Plain-text grid format:
//   n=<int>
//   v_00,v_01,...,v_0n
//   ...
// one row per s-index for 2D, a single row for 1D. Values are written with
// 17 significant digits so a read after write is value-exact.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pillow/grid.hpp"

namespace pillow {

void write_csv(std::ostream& os, const GridFn1D& g);
void write_csv(std::ostream& os, const GridFn2D& g);

GridFn1D read_csv_1d(std::istream& is);
GridFn2D read_csv_2d(std::istream& is);

GridFn1D read_csv_1d(const std::filesystem::path& path);
GridFn2D read_csv_2d(const std::filesystem::path& path);

std::string to_csv(const GridFn2D& g);

}  // namespace pillow
