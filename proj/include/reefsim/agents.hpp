#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "reefsim/rng.hpp"
#include "reefsim/world.hpp"

namespace reefsim {

enum class TickKind { Day, Night };
enum class FisherKind { Pro, Annex };

struct Household {
  int id = -1;
  int district = -1;
  int location = -1;  // land cell
  int n_pro = 0;
  int n_annex = 0;
  bool has_boat = false;
  bool has_pirogue = false;

  bool operator==(const Household&) const = default;
};

// All sampled attributes are drawn once at creation and never re-sampled;
// scenarios adjust only the effective fields (radius_m, period).
struct Fisher {
  int id = -1;
  int household = -1;
  FisherKind kind = FisherKind::Annex;
  int departure_cell = -1;

  double base_radius_m = 1000.0;  // 10 km boat, 3 km pirogue, 1 km swimming
  double trip_probability = 0.0;  // per day, on the fisher's own period
  double trip_duration_h = 4.0;   // 8 h pro, 4 h annex
  double selectivity = 0.0;       // in [0,1]; selective fishers land less
  TickKind base_period = TickKind::Night;  // night with probability 0.7
  double resource_dependence = 0.0;        // district value in [0,1]

  double radius_m = 1000.0;
  TickKind period = TickKind::Night;

  bool operator==(const Fisher&) const = default;
};

struct TripOutcome {
  int fisher_id = -1;
  int tick = -1;
  int cell = -1;                 // fished cell (after any relocation)
  int pre_relocation_cell = -1;  // roulette pick; conflicts counted here
  bool relocated = false;
  bool poached = false;  // fished inside an MPA
  double catch_kg = 0.0;
  std::uint8_t conflicts_fisher = 0;
  std::uint8_t conflicts_tourism = 0;
};

// One row of the per-district population input.
struct DistrictRow {
  int district = -1;
  int households = 0;
  int pro = 0;
  int annex = 0;
  int boats = 0;
  int pirogues = 0;
  double dependence = 0.0;
};

struct Population {
  std::vector<Household> households;
  std::vector<Fisher> fishers;

  bool operator==(const Population&) const = default;
};

// Builds households and fishers from the district table. Draws come from a
// single stream in a fixed order: districts ascending; per district the
// household placements, then boat and pirogue assignments, then each
// fisher's household, trip probability, selectivity and period.
Population generate_population(const WorldGrid& world,
                               const std::vector<DistrictRow>& table,
                               std::uint64_t seed);

// Moorea-scale totals (2244 fishers, 440 of them professional) spread over
// the world's districts in proportion to their coastline, scaled down to
// total_fishers. Equipment and dependence use seeded defaults.
std::vector<DistrictRow> make_default_district_table(const WorldGrid& world,
                                                     int total_fishers,
                                                     std::uint64_t seed);

std::vector<DistrictRow> load_district_table(const std::filesystem::path& file);
void save_district_table(const std::vector<DistrictRow>& table,
                         const std::filesystem::path& file);

// households.csv + fishers.csv in a directory; reload gives exact replay.
void save_population(const Population& pop, const WorldGrid& world,
                     const std::filesystem::path& dir);
Population load_population(const WorldGrid& world,
                           const std::filesystem::path& dir);

// Coastal land cells (land with a navigable 8-neighbor) of one district.
std::vector<int> coastal_land_cells(const WorldGrid& world, int district);

// Nearest fishable cell to a land cell by straight-line distance between
// cell centers; ties resolve to the lowest cell index.
int nearest_fishable_cell(const WorldGrid& world, int land_cell);

// --- per-tick behavior ----------------------------------------------------

// True with the fisher's trip probability, evaluated only on ticks matching
// the fisher's period (no draw is consumed otherwise).
bool decide_trip(const Fisher& fisher, TickKind kind, Rng& rng);

// Probability that MPA cells are admitted to the candidate set this trip.
double poaching_probability(const Fisher& fisher, TickKind kind,
                            double surveillance = 0.2);

struct LayerMaxima {
  double preference_max = 0.0;
  double biomass_max = 0.0;
  double tourism_max = 0.0;
};

// Zone-choice sub-criteria, each in [0, 1]. A zero maximum makes a direct
// criterion 0 and an inverse criterion 1.
double direct_criterion(double value, double max_value);
double inverse_criterion(double value, double max_value);

// Sum of the five choice criteria for one candidate cell. Tourism only
// deters day trips; the occupancy criterion is 0.4 for an empty cell and
// 0.2 otherwise.
double score_cell(const Cell& cell, const Fisher& fisher, double dist_m,
                  const LayerMaxima& maxima, bool occupied, TickKind kind);

enum class ChoiceRule { Roulette, Argmax };

// Samples an index with probability proportional to its weight (all weights
// must be positive).
int roulette_pick(std::span<const double> weights, Rng& rng);
// Highest weight, ties broken uniformly at random.
int argmax_pick(std::span<const double> weights, Rng& rng);

struct RelocationResult {
  int cell = -1;
  bool relocated = false;
};

// If the chosen cell already hosts a fisher, move to an unoccupied fishable
// 8-neighbor (uniformly), else any fishable neighbor, else stay. Neighbors
// must satisfy eligible(cell) — the caller restricts to the fisher's
// reachable zone and, for non-poachers, to non-MPA cells.
template <typename Eligible>
RelocationResult resolve_relocation(const WorldGrid& world, int chosen,
                                    const std::vector<int>& occupancy,
                                    Eligible&& eligible, Rng& rng) {
  if (occupancy[static_cast<std::size_t>(chosen)] == 0) return {chosen, false};
  std::array<int, 8> nbr{};
  const int n = world.neighbors8(chosen, nbr);
  std::array<int, 8> open{}, any{};
  int n_open = 0, n_any = 0;
  for (int k = 0; k < n; ++k) {
    const int cell = nbr[static_cast<std::size_t>(k)];
    if (!fishable(world.at(cell).habitat) || !eligible(cell)) continue;
    any[static_cast<std::size_t>(n_any++)] = cell;
    if (occupancy[static_cast<std::size_t>(cell)] == 0)
      open[static_cast<std::size_t>(n_open++)] = cell;
  }
  if (n_open > 0)
    return {open[static_cast<std::size_t>(rng.uniform_below(
                static_cast<std::uint64_t>(n_open)))],
            true};
  if (n_any > 0)
    return {any[static_cast<std::size_t>(rng.uniform_below(
                static_cast<std::uint64_t>(n_any)))],
            true};
  return {chosen, false};
}

struct ChoiceResult {
  int cell = -1;                 // final cell
  int pre_relocation_cell = -1;  // roulette/argmax pick
  bool relocated = false;
};

// Reference composition of scoring, pick and relocation over an explicit
// candidate set. The engine runs an equivalent path with precomputed
// criterion sums; this form exists for direct testing against the formulas.
std::optional<ChoiceResult> choose_fishing_cell(
    const Fisher& fisher, const WorldGrid& world,
    std::span<const int> candidates, std::span<const double> dist_m,
    const LayerMaxima& maxima, const std::vector<int>& occupancy,
    bool mpa_allowed, TickKind kind, ChoiceRule rule, Rng& rng);

// Removes catch from the cell: biomass * hours * (1 - selectivity) * rate,
// doubled at night, clamped by the quota and by what the cell holds. The
// removal splits across herbivores and carnivores pro rata; corallivores are
// never caught. Returns the landed mass (kg, quantized to 1e-9).
double fish(const Fisher& fisher, Cell& cell, TickKind kind,
            double capture_rate_day_per_hour,
            std::optional<double> quota_kg);

// Conflicts at arrival, before relocation: one fisher conflict if another
// fisher already holds the cell, one tourism conflict on day ticks when the
// tourism level exceeds the threshold.
std::pair<int, int> record_conflicts(int n_other_fishers, double tourism_level,
                                     TickKind kind, double tourism_threshold);

constexpr double kDefaultCaptureRatePerHour = 0.002;
constexpr double kDefaultSurveillance = 0.2;

}  // namespace reefsim
