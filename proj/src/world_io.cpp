#include "reefsim/world_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace reefsim {

namespace fs = std::filesystem;

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

RasterLayer read_layer(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open layer file: " + file.string());

  RasterLayer layer;
  if (!(in >> layer.n_cols >> layer.n_rows) || layer.n_cols <= 0 || layer.n_rows <= 0)
    throw ValidationError("bad layer header in " + file.string());

  const std::size_t n = static_cast<std::size_t>(layer.n_rows) *
                        static_cast<std::size_t>(layer.n_cols);
  layer.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> layer.values[i]))
      throw ValidationError("layer " + file.string() + " is truncated (expected " +
                            std::to_string(n) + " values)");
  }
  return layer;
}

void write_layer(const fs::path& file, int n_rows, int n_cols,
                 const std::vector<double>& values) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write layer file: " + file.string());
  out << n_cols << ' ' << n_rows << '\n';
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      if (c) out << ' ';
      out << format_g6(values[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cols) +
                              static_cast<std::size_t>(c)]);
    }
    out << '\n';
  }
  if (!out) throw ValidationError("write failed: " + file.string());
}

namespace {

// The canonical layer set, in bundle order.
const char* const kLayerNames[] = {
    "habitat",     "mpa",          "district",   "coral",
    "turf",        "macroalgae",   "herbivores", "corallivores",
    "carnivores",  "preference",   "tourism",
};
constexpr int kLayerCount = 11;

std::map<std::string, std::string> read_header(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open bundle header: " + file.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\"");
      const auto e = s.find_last_not_of(" \t\r\"");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

int int_value(const RasterLayer& layer, std::size_t i, const char* what) {
  const double v = layer.values[i];
  const double r = std::nearbyint(v);
  if (std::abs(v - r) > 1e-9)
    throw ValidationError(std::string(what) + " layer holds a non-integer value");
  return static_cast<int>(r);
}

}  // namespace

WorldGrid load_world(const fs::path& bundle_dir) {
  const fs::path header_path = bundle_dir / "world.toml";
  auto kv = read_header(header_path);

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ValidationError("bundle header missing key '" + key + "'");
    return it->second;
  };

  WorldGrid world;
  world.n_rows = std::stoi(require("n_rows"));
  world.n_cols = std::stoi(require("n_cols"));
  world.cell_size_m = std::stod(require("cell_size_m"));
  if (world.n_rows <= 0 || world.n_cols <= 0)
    throw ValidationError("bundle header has non-positive grid dimensions");
  if (world.cell_size_m <= 0.0)
    throw ValidationError("bundle header has non-positive cell_size_m");

  std::map<std::string, RasterLayer> layers;
  for (const char* name : kLayerNames) {
    const std::string file = require(std::string("layer.") + name);
    RasterLayer layer = read_layer(bundle_dir / file);
    if (layer.n_rows != world.n_rows || layer.n_cols != world.n_cols)
      throw ValidationError("layer '" + std::string(name) +
                            "' dimensions do not match bundle header");
    layers.emplace(name, std::move(layer));
  }

  world.cells.assign(static_cast<std::size_t>(world.size()), Cell{});
  for (std::size_t i = 0; i < world.cells.size(); ++i) {
    Cell& cell = world.cells[i];
    const int code = int_value(layers["habitat"], i, "habitat");
    if (code < 0 || code >= kHabitatCount)
      throw ValidationError("habitat code " + std::to_string(code) +
                            " outside enumeration");
    cell.habitat = static_cast<HabitatClass>(code);
    const int mpa = int_value(layers["mpa"], i, "mpa");
    if (mpa != 0 && mpa != 1) throw ValidationError("mpa layer value not 0/1");
    cell.mpa = mpa == 1;
    cell.district = int_value(layers["district"], i, "district");
    if (cell.district < kNoDistrict)
      throw ValidationError("district id below the -1 sentinel");
    cell.coral = layers["coral"].values[i];
    cell.turf = layers["turf"].values[i];
    cell.macroalgae = layers["macroalgae"].values[i];
    cell.fish[kHerbivore] = layers["herbivores"].values[i];
    cell.fish[kCorallivore] = layers["corallivores"].values[i];
    cell.fish[kCarnivore] = layers["carnivores"].values[i];
    cell.preference = layers["preference"].values[i];
    cell.tourism = layers["tourism"].values[i];
  }

  world.finalize_initial_state();
  return world;
}

void save_world(const WorldGrid& world, const fs::path& bundle_dir) {
  fs::create_directories(bundle_dir);
  std::ofstream header(bundle_dir / "world.toml");
  if (!header)
    throw ValidationError("cannot write bundle header in " + bundle_dir.string());
  header << "n_rows = " << world.n_rows << '\n'
         << "n_cols = " << world.n_cols << '\n'
         << "cell_size_m = " << format_g6(world.cell_size_m) << '\n';
  for (const char* name : kLayerNames)
    header << "layer." << name << " = " << name << ".asc\n";
  header.close();

  const std::size_t n = world.cells.size();
  std::vector<double> values(n);
  auto dump = [&](const char* name, auto getter) {
    for (std::size_t i = 0; i < n; ++i) values[i] = getter(world.cells[i]);
    write_layer(bundle_dir / (std::string(name) + ".asc"), world.n_rows,
                world.n_cols, values);
  };
  dump("habitat", [](const Cell& c) { return static_cast<double>(c.habitat); });
  dump("mpa", [](const Cell& c) { return c.mpa ? 1.0 : 0.0; });
  dump("district", [](const Cell& c) { return static_cast<double>(c.district); });
  dump("coral", [](const Cell& c) { return c.coral; });
  dump("turf", [](const Cell& c) { return c.turf; });
  dump("macroalgae", [](const Cell& c) { return c.macroalgae; });
  dump("herbivores", [](const Cell& c) { return c.fish[kHerbivore]; });
  dump("corallivores", [](const Cell& c) { return c.fish[kCorallivore]; });
  dump("carnivores", [](const Cell& c) { return c.fish[kCarnivore]; });
  dump("preference", [](const Cell& c) { return c.preference; });
  dump("tourism", [](const Cell& c) { return c.tourism; });
}

}  // namespace reefsim
