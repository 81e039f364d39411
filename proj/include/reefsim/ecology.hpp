#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "reefsim/world.hpp"

namespace reefsim {

// Order fixed: benthic groups first, then the fish groups in FishGroup order.
enum class TrophicGroup : int {
  Coral = 0,
  Turf = 1,
  Herbivore = 2,
  Corallivore = 3,
  Carnivore = 4,
};
constexpr int kTrophicCount = 5;
extern const std::array<const char*, kTrophicCount> kTrophicNames;

// State vector for one cell: coral and turf as surface fractions, fish
// groups as kg per cell.
using TrophicState = std::array<double, kTrophicCount>;

// Per-day rate coefficients of the generalized Lotka-Volterra system. Every
// coefficient is nonnegative; the signs live in the equation structure.
// Inhibition coefficients are named beta_<impacted>_<impacting>.
struct LVParams {
  std::array<double, kTrophicCount> alpha{};  // intrinsic growth, day^-1
  std::array<double, kTrophicCount> gamma{};  // intrinsic mortality (fish only)

  double beta_coral_turf = 0.0;
  double beta_coral_corallivore = 0.0;
  double beta_turf_herbivore = 0.0;
  double beta_turf_coral = 0.0;
  double beta_herbivore_carnivore = 0.0;
  double beta_corallivore_carnivore = 0.0;

  double delta_herbivore_turf = 0.0;
  double delta_corallivore_coral = 0.0;
  double delta_carnivore_prey = 0.0;  // multiplies herbivores + corallivores

  // day^-1 per fisher present in the cell.
  double beta_fisher_herbivore = 0.0;
  double beta_fisher_carnivore = 0.0;

  // Extra coral mortality while the disturbance indicator is on.
  double cots_destruction = kDefaultCotsDestruction;

  static constexpr double kDefaultCotsDestruction = 9.2e-4;
};

// Table 5 growth rates (day^-1).
struct GrowthRates {
  double coral = 3.0e-5;
  double turf = 1.0e-2;
  double herbivore = 9.4e-4;
  double corallivore = 4.2e-4;
  double carnivore = 4.4e-4;
};

// Merged COTS/cyclone forcing: constant extra coral mortality on outer-slope
// cells during [start_day, start_day + duration_days).
struct DisturbanceSchedule {
  bool enabled = false;
  int start_day = 730;       // two years in
  int duration_days = 1825;  // five years

  void validate() const {
    if (start_day < 0) throw ValidationError("disturbance start_day must be >= 0");
    if (duration_days <= 0)
      throw ValidationError("disturbance duration_days must be positive");
  }
  bool active_on_day(int day) const {
    return enabled && day >= start_day && day < start_day + duration_days;
  }
  bool operator==(const DisturbanceSchedule&) const = default;
};

enum class CalibrationMethod { BalancedPartition, PaperLiteral };
enum class CalibrationScope { GlobalMean, PerCell };

struct CalibrationMode {
  CalibrationMethod method = CalibrationMethod::BalancedPartition;
  CalibrationScope scope = CalibrationScope::GlobalMean;
};

// Result of calibrate(). per_cell is populated (one entry per cell) only
// under PerCell scope; the global set is always filled.
struct CalibratedParams {
  LVParams global;
  std::vector<LVParams> per_cell;

  const LVParams& for_cell(int idx) const {
    return per_cell.empty() ? global : per_cell[static_cast<std::size_t>(idx)];
  }
};

// Reference values a parameter set is balanced against.
struct ReferenceState {
  double coral = 0.0;
  double turf = 0.0;
  double herbivores = 0.0;
  double corallivores = 0.0;
  double carnivores = 0.0;
  double fishers = 0.0;  // mean fishers per cell; 0 drops the fisher term
};

// Fixed-point calibration. Under BalancedPartition each group's growth rate
// is split equally across its inhibitor terms and its mortality rate across
// its facilitator terms, so the reference state is an exact equilibrium
// (a group left with no inhibitor gets zero facilitation for the same
// reason). PaperLiteral applies beta = alpha/y0 and delta = gamma/z0 term by
// term without the partition.
LVParams calibrate_from_reference(const GrowthRates& alphas,
                                  const ReferenceState& ref,
                                  CalibrationMethod method,
                                  double cots_destruction,
                                  bool reject_zero_reference);

CalibratedParams calibrate(const WorldGrid& world, const GrowthRates& alphas,
                           CalibrationMode mode, double mean_fishers_per_cell,
                           double cots_destruction = LVParams::kDefaultCotsDestruction);

ReferenceState fishable_means(const WorldGrid& world);

// Right-hand side of the per-cell system, per day. Pure; inputs must be
// nonnegative. The fisher term is part of the equations; callers that run
// capture-based fishing mortality pass n_fishers = 0 here.
TrophicState lv_derivative(const TrophicState& state, const LVParams& params,
                           int n_fishers, bool cots_active);

// One explicit Euler update of a cell followed by the substrate cap (coral
// keeps priority over turf) and the per-group carrying-capacity clamp.
void step_cell(Cell& cell, const LVParams& params, double dt_days,
               int n_fishers, bool cots_active);

// Spillover bookkeeping for one tick. Mass moves between fishable cells;
// totals are per fish group.
struct SpilloverReport {
  std::array<double, kFishGroupCount> moved{};         // accepted transfers
  std::array<double, kFishGroupCount> total_before{};  // fishable-cell sums
  std::array<double, kFishGroupCount> total_after{};
  double mpa_to_outside = 0.0;  // accepted mass leaving MPA cells
  double outside_to_mpa = 0.0;

  double moved_total() const { return moved[0] + moved[1] + moved[2]; }
};

// For every fishable cell whose biomass exceeds threshold * K, the excess is
// exported in equal shares to its fishable 8-neighbors. Receivers accept at
// most their headroom K - B (all quantities from a frozen pre-pass snapshot,
// so the result is independent of evaluation order); rejected shares stay
// with the exporter. Total biomass is conserved exactly.
SpilloverReport apply_spillover(WorldGrid& world, double threshold_fraction = 0.9);

// Flat key/value dump of a calibrated parameter set, for audit and re-use.
void save_lv_params(const LVParams& params, const std::filesystem::path& file);
LVParams load_lv_params(const std::filesystem::path& file);

}  // namespace reefsim
