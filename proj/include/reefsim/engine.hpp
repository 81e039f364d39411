#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "reefsim/agents.hpp"
#include "reefsim/ecology.hpp"
#include "reefsim/scenario.hpp"
#include "reefsim/world.hpp"

namespace reefsim {

// Even ticks are day, odd ticks are night; two ticks make a simulated day.
struct Clock {
  static constexpr int kTicksPerDay = 2;
  static constexpr int kDaysPerYear = 365;
  static constexpr int kDefaultHorizonTicks = 20 * kDaysPerYear * kTicksPerDay;

  static TickKind kind_of(int tick) {
    return tick % 2 == 0 ? TickKind::Day : TickKind::Night;
  }
  static int day_of(int tick) { return tick / kTicksPerDay; }
  static int ticks_for_years(double years) {
    return static_cast<int>(std::lround(years * kDaysPerYear * kTicksPerDay));
  }
  static double years_for_ticks(int ticks) {
    return static_cast<double>(ticks) / (kDaysPerYear * kTicksPerDay);
  }
};

// Whether fishing removes biomass through the discrete capture formula, the
// Lotka-Volterra fisher term, or both. The default avoids double counting.
enum class FishingMortalityMode { DiscreteCapture, LvTerm, Both };

FishingMortalityMode fishing_mode_from_string(const std::string& s);
std::string to_string(FishingMortalityMode m);
ChoiceRule choice_rule_from_string(const std::string& s);
std::string to_string(ChoiceRule r);

struct SimConfig {
  int horizon_ticks = Clock::kDefaultHorizonTicks;
  double dt_days = 0.5;
  double surveillance = kDefaultSurveillance;
  double capture_rate_day_per_hour = kDefaultCaptureRatePerHour;
  double tourism_conflict_threshold = 0.0;
  double spillover_threshold = 0.9;
  FishingMortalityMode fishing_mortality_mode = FishingMortalityMode::DiscreteCapture;
  ChoiceRule choice_rule = ChoiceRule::Roulette;
  int ecology_threads = 1;
  int log_every_ticks = 0;  // progress lines to stderr; 0 silences them
  bool keep_trip_log = true;

  void validate() const;
};

// One row per tick plus the initial snapshot (row 0).
struct TimeSeries {
  std::vector<double> coral_lagoon, turf_lagoon;
  std::vector<double> coral_slope, turf_slope;
  // Mean kg per cell for each fish group over: all fishable cells, MPA,
  // non-MPA, lagoon, outer slope.
  std::array<std::vector<double>, kFishGroupCount> mean_all, mean_mpa,
      mean_outside, mean_lagoon, mean_slope;
  std::vector<double> catch_kg;
  std::vector<int> conflicts_fisher, conflicts_tourism;
  std::vector<double> spillover_mpa_export, spillover_mpa_import;

  std::size_t rows() const { return catch_kg.size(); }
};

// Per-cell tallies over the whole run. Catch is held in integer nanograms
// of a kilogram so sums agree exactly whatever the summation order.
struct CellAccumulators {
  std::vector<std::int64_t> catch_nanokg;
  std::vector<std::int32_t> conflicts_day, conflicts_night;
  std::array<std::vector<double>, kFishGroupCount> initial_biomass, final_biomass;
};

inline std::int64_t to_nanokg(double kg) {
  return static_cast<std::int64_t>(std::llround(kg * 1e9));
}
inline double from_nanokg(std::int64_t nano) {
  return static_cast<double>(nano) / 1e9;
}

struct RunResult {
  WorldGrid world;  // final state
  TimeSeries series;
  CellAccumulators accum;
  std::vector<TripOutcome> trips;

  int n_fishers = 0;  // after the scenario was applied
  std::uint64_t seed = 0;
  ScenarioConfig scenario;
  SimConfig config;

  // Invariant audit collected while running.
  double max_substrate_excess = 0.0;       // beyond the cap (should be 0)
  double max_carrying_excess = 0.0;        // beyond K (should be 0)
  double max_spillover_imbalance = 0.0;    // relative, per tick

  double total_catch_kg() const;
  long total_conflicts() const;
};

// Runs the full tick protocol: disturbance indicator, ecology step from a
// frozen snapshot, spillover, then the fishers in a freshly shuffled order.
// The scenario is applied to the population here (idempotent), so callers
// may pass either a raw or an already-adjusted roster.
RunResult run(const WorldGrid& world, const std::vector<Fisher>& population,
              const ScenarioConfig& scenario, const CalibratedParams& params,
              const SimConfig& config, std::uint64_t seed);

// Two runs from the identical initial world, population and seed. Both
// configs must agree on the disturbance schedule.
std::pair<RunResult, RunResult> run_pair(const WorldGrid& world,
                                         const std::vector<Fisher>& population,
                                         const ScenarioConfig& base,
                                         const ScenarioConfig& variant,
                                         const CalibratedParams& params,
                                         const SimConfig& config,
                                         std::uint64_t seed);

}  // namespace reefsim
