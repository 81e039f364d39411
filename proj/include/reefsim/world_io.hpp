#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "reefsim/world.hpp"

namespace reefsim {

// Layer files are plain text: a first line "ncols nrows", then nrows lines
// of ncols space-separated values. Reals carry 6 significant digits.
struct RasterLayer {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> values;  // row-major
};

RasterLayer read_layer(const std::filesystem::path& file);
void write_layer(const std::filesystem::path& file, int n_rows, int n_cols,
                 const std::vector<double>& values);

// A map bundle is a directory holding world.toml (key = value header with
// grid dimensions, cell size and one layer file name per field) plus the
// layer files themselves.
WorldGrid load_world(const std::filesystem::path& bundle_dir);
void save_world(const WorldGrid& world, const std::filesystem::path& bundle_dir);

// Formats a double with 6 significant digits (the raster convention).
std::string format_g6(double v);

}  // namespace reefsim
