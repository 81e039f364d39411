#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reefsim/engine.hpp"

namespace reefsim {

constexpr double kRasterSentinel = -9999.0;
constexpr const char* kCodeVersion = "reefsim 1.0.0";

struct GlobalIndicators {
  // Final over initial total fish biomass across fishable cells.
  std::optional<double> biomass_variation;  // empty when nothing was there
  // Per fisher and per year; empty when the run had no fishers.
  std::optional<double> annual_catch_per_fisher;
  std::optional<double> annual_conflicts_per_fisher;

  double total_catch_kg = 0.0;
  long total_conflicts = 0;
  double years = 0.0;
  int n_fishers = 0;
};

struct IndicatorRasters {
  int n_rows = 0;
  int n_cols = 0;
  // Sentinel kRasterSentinel marks non-fishable cells and cells whose
  // denominator is empty (zero initial biomass for the variation raster).
  std::vector<double> biomass_variation;
  std::vector<double> annual_catch;
  std::vector<double> annual_conflicts_day;
  std::vector<double> annual_conflicts_night;
};

struct DistrictIndicator {
  int district = -1;
  int n_fishers = 0;
  double annual_catch_per_fisher = 0.0;
  double annual_conflicts_per_fisher = 0.0;
};

struct Indicators {
  GlobalIndicators global;
  IndicatorRasters rasters;
};

Indicators indicators(const RunResult& result);

// Catch and conflicts grouped by the fisher's household district (needs the
// trip log). A district -> commune mapping file can merge districts.
std::vector<DistrictIndicator> district_indicators(const RunResult& result,
                                                   const Population& pop);
std::vector<DistrictIndicator> aggregate_by_commune(
    const std::vector<DistrictIndicator>& rows,
    const std::vector<std::pair<int, int>>& district_to_commune);
std::vector<std::pair<int, int>> load_commune_map(const std::filesystem::path& file);

struct RatioTable {
  std::optional<double> biomass_variation;
  std::optional<double> annual_catch;
  std::optional<double> annual_conflicts;
};

struct Comparison {
  Indicators base;
  Indicators variant;
  RatioTable ratios;
  IndicatorRasters ratio_rasters;  // variant / base, sentinel where base <= 0
};

Comparison compare(const RunResult& base, const RunResult& variant);

// Output tree: timeseries.csv, raster_*.asc, global.csv, districts.csv (when
// district rows exist) and manifest.txt. Deterministic byte-for-byte.
void export_run(const RunResult& result, const Indicators& ind,
                const std::vector<DistrictIndicator>& districts,
                const std::filesystem::path& out_dir);

// ratios.csv plus the per-cell ratio rasters; base/variant trees are written
// by the caller.
void export_comparison(const Comparison& comparison,
                       const std::filesystem::path& out_dir);

void write_trip_log(const RunResult& result, const std::filesystem::path& file);

// Shortest decimal form that parses back to exactly the same double.
std::string format_exact(double v);

}  // namespace reefsim
