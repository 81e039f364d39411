#include "reefsim/world.hpp"

#include <cmath>
#include <queue>
#include <sstream>

namespace reefsim {

const std::array<const char*, kFishGroupCount> kFishGroupNames = {
    "herbivores", "corallivores", "carnivores"};

const char* habitat_name(HabitatClass h) {
  switch (h) {
    case HabitatClass::Land: return "land";
    case HabitatClass::Lagoon: return "lagoon";
    case HabitatClass::ReefCrest: return "reef_crest";
    case HabitatClass::Pass: return "pass";
    case HabitatClass::OuterSlope: return "outer_slope";
    case HabitatClass::OpenOcean: return "open_ocean";
  }
  return "?";
}

std::vector<int> WorldGrid::fishable_cells() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (fishable(cells[static_cast<std::size_t>(i)].habitat)) out.push_back(i);
  return out;
}

int WorldGrid::count_fishable() const {
  int n = 0;
  for (const Cell& c : cells)
    if (fishable(c.habitat)) ++n;
  return n;
}

int WorldGrid::count_mpa() const {
  int n = 0;
  for (const Cell& c : cells)
    if (c.mpa) ++n;
  return n;
}

int WorldGrid::neighbors8(int idx, std::array<int, 8>& out) const {
  const int r = row_of(idx), c = col_of(idx);
  int n = 0;
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (in_bounds(r + dr, c + dc)) out[static_cast<std::size_t>(n++)] = index(r + dr, c + dc);
    }
  return n;
}

namespace {

[[noreturn]] void cell_error(const WorldGrid& w, int idx, const std::string& what) {
  std::ostringstream os;
  os << "cell (" << w.row_of(idx) << "," << w.col_of(idx) << "): " << what;
  throw ValidationError(os.str());
}

}  // namespace

void WorldGrid::finalize_initial_state() {
  if (n_rows <= 0 || n_cols <= 0)
    throw ValidationError("grid dimensions must be positive");
  if (cell_size_m <= 0.0) throw ValidationError("cell_size_m must be positive");
  if (cells.size() != static_cast<std::size_t>(size()))
    throw ValidationError("cell array size does not match grid dimensions");

  int n_fishable = 0;
  for (int i = 0; i < size(); ++i) {
    Cell& cell = at(i);
    if (cell.coral < 0.0 || cell.turf < 0.0 || cell.macroalgae < 0.0)
      cell_error(*this, i, "negative benthic cover");
    if (cell.coral + cell.turf > 1.0 + 1e-12)
      cell_error(*this, i, "coral + turf exceeds 1");
    for (double b : cell.fish)
      if (b < 0.0) cell_error(*this, i, "negative fish biomass");
    if (cell.preference < 0.0) cell_error(*this, i, "negative preference");
    if (cell.tourism < 0.0) cell_error(*this, i, "negative tourism");

    if (cell.habitat == HabitatClass::Land) {
      if (cell.coral != 0.0 || cell.turf != 0.0 || cell.macroalgae != 0.0)
        cell_error(*this, i, "land cell with nonzero benthic cover");
      if (cell.total_fish() != 0.0)
        cell_error(*this, i, "land cell with nonzero fish biomass");
      if (cell.preference != 0.0 || cell.tourism != 0.0)
        cell_error(*this, i, "land cell with nonzero preference or tourism");
    }

    cell.substrate_cap = cell.coral + cell.turf;
    for (int g = 0; g < kFishGroupCount; ++g)
      cell.carrying[static_cast<std::size_t>(g)] = 2.0 * cell.fish[static_cast<std::size_t>(g)];
    if (fishable(cell.habitat)) ++n_fishable;
  }
  if (n_fishable == 0) throw ValidationError("no fishable cells in world");
}

DistanceField distance_field(const WorldGrid& world, int origin) {
  if (origin < 0 || origin >= world.size())
    throw ValidationError("distance_field: origin out of bounds");
  if (!navigable(world.at(origin).habitat))
    throw ValidationError("distance_field: origin cell is not navigable");

  DistanceField field;
  field.origin = origin;
  field.dist_m.assign(static_cast<std::size_t>(world.size()),
                      DistanceField::kUnreachable);

  const double orth = world.cell_size_m;
  const double diag = world.cell_size_m * std::sqrt(2.0);

  using Entry = std::pair<double, int>;  // (distance, cell); ties by index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  field.dist_m[static_cast<std::size_t>(origin)] = 0.0;
  queue.emplace(0.0, origin);

  while (!queue.empty()) {
    auto [d, idx] = queue.top();
    queue.pop();
    if (d > field.dist_m[static_cast<std::size_t>(idx)]) continue;
    const int r = world.row_of(idx), c = world.col_of(idx);
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        if (!world.in_bounds(r + dr, c + dc)) continue;
        const int nidx = world.index(r + dr, c + dc);
        if (!navigable(world.at(nidx).habitat)) continue;
        const double nd = d + ((dr != 0 && dc != 0) ? diag : orth);
        if (nd < field.dist_m[static_cast<std::size_t>(nidx)]) {
          field.dist_m[static_cast<std::size_t>(nidx)] = nd;
          queue.emplace(nd, nidx);
        }
      }
  }
  return field;
}

std::vector<int> reachable_fishable_cells(const WorldGrid& world,
                                          const DistanceField& field,
                                          double radius_m) {
  if (radius_m <= 0.0)
    throw ValidationError("reachable_fishable_cells: radius must be positive");
  std::vector<int> out;
  for (int i = 0; i < world.size(); ++i)
    if (fishable(world.at(i).habitat) &&
        field.dist_m[static_cast<std::size_t>(i)] <= radius_m)
      out.push_back(i);
  return out;
}

std::vector<int> reachable_fishable_cells(const WorldGrid& world, int origin,
                                          double radius_m) {
  return reachable_fishable_cells(world, distance_field(world, origin), radius_m);
}

const DistanceField& DistanceFieldCache::get(const WorldGrid& world, int origin) {
  auto it = fields_.find(origin);
  if (it == fields_.end()) {
    it = fields_.emplace(origin, std::make_unique<DistanceField>(
                                     distance_field(world, origin)))
             .first;
  }
  return *it->second;
}

}  // namespace reefsim
