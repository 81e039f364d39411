#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "reefsim/errors.hpp"

namespace reefsim {

// Habitat codes are stable: they are the integer values written to the
// habitat layer of a map bundle.
enum class HabitatClass : int {
  Land = 0,
  Lagoon = 1,
  ReefCrest = 2,
  Pass = 3,
  OuterSlope = 4,
  OpenOcean = 5,
};

constexpr int kHabitatCount = 6;
constexpr int kNoDistrict = -1;

inline bool navigable(HabitatClass h) {
  return h == HabitatClass::Lagoon || h == HabitatClass::Pass ||
         h == HabitatClass::OuterSlope || h == HabitatClass::OpenOcean;
}

inline bool fishable(HabitatClass h) {
  return h == HabitatClass::Lagoon || h == HabitatClass::Pass ||
         h == HabitatClass::OuterSlope;
}

const char* habitat_name(HabitatClass h);

// Fish groups, indexing the per-cell biomass arrays.
enum FishGroup : int {
  kHerbivore = 0,
  kCorallivore = 1,
  kCarnivore = 2,
};
constexpr int kFishGroupCount = 3;
extern const std::array<const char*, kFishGroupCount> kFishGroupNames;

struct Cell {
  HabitatClass habitat = HabitatClass::Land;
  bool mpa = false;
  int district = kNoDistrict;

  // Benthic cover, fraction of substrate surface. Macroalgae never change.
  double coral = 0.0;
  double turf = 0.0;
  double macroalgae = 0.0;

  // kg per cell, indexed by FishGroup.
  std::array<double, kFishGroupCount> fish{0.0, 0.0, 0.0};

  // Static layers.
  double preference = 0.0;  // fishing-preference index, >= 0
  double tourism = 0.0;     // mean daily tourist-operator passages, >= 0

  // Derived at load time from the initial state.
  double substrate_cap = 0.0;                              // initial coral+turf
  std::array<double, kFishGroupCount> carrying{0.0, 0.0, 0.0};  // 2 x initial

  double herbivores() const { return fish[kHerbivore]; }
  double corallivores() const { return fish[kCorallivore]; }
  double carnivores() const { return fish[kCarnivore]; }
  double fishable_biomass() const { return fish[kHerbivore] + fish[kCarnivore]; }
  double total_fish() const { return fish[0] + fish[1] + fish[2]; }

  bool operator==(const Cell&) const = default;
};

struct WorldGrid {
  int n_rows = 0;
  int n_cols = 0;
  double cell_size_m = 100.0;
  std::vector<Cell> cells;  // row-major

  int size() const { return n_rows * n_cols; }
  int index(int row, int col) const { return row * n_cols + col; }
  int row_of(int idx) const { return idx / n_cols; }
  int col_of(int idx) const { return idx % n_cols; }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < n_rows && col >= 0 && col < n_cols;
  }
  Cell& at(int idx) { return cells[static_cast<std::size_t>(idx)]; }
  const Cell& at(int idx) const { return cells[static_cast<std::size_t>(idx)]; }
  Cell& at(int row, int col) { return cells[static_cast<std::size_t>(index(row, col))]; }
  const Cell& at(int row, int col) const {
    return cells[static_cast<std::size_t>(index(row, col))];
  }

  std::vector<int> fishable_cells() const;
  int count_fishable() const;
  int count_mpa() const;

  // 8-neighborhood of a flat index, in fixed scan order (NW..SE).
  // Returns the number written into out.
  int neighbors8(int idx, std::array<int, 8>& out) const;

  // Computes substrate_cap and carrying capacity from the current (initial)
  // state and checks every cell invariant. Throws ValidationError.
  void finalize_initial_state();
};

// Shortest boat distance from one origin to every cell, travelling over
// navigable cells only (8-connected; orthogonal steps cost cell_size_m,
// diagonal steps cell_size_m * sqrt(2)). Unreachable cells hold +infinity.
struct DistanceField {
  int origin = -1;
  std::vector<double> dist_m;

  static constexpr double kUnreachable = std::numeric_limits<double>::infinity();
};

DistanceField distance_field(const WorldGrid& world, int origin);

// All fishable cells within radius_m of path distance from origin
// (origin included if fishable). Ascending cell index.
std::vector<int> reachable_fishable_cells(const WorldGrid& world,
                                          const DistanceField& field,
                                          double radius_m);
std::vector<int> reachable_fishable_cells(const WorldGrid& world, int origin,
                                          double radius_m);

// Distance fields are expensive and departure cells are shared by many
// fishers, so they are computed lazily and kept per origin.
class DistanceFieldCache {
public:
  const DistanceField& get(const WorldGrid& world, int origin);
  std::size_t size() const { return fields_.size(); }

private:
  std::unordered_map<int, std::unique_ptr<DistanceField>> fields_;
};

}  // namespace reefsim
