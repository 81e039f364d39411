#include "reefsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "reefsim/world_io.hpp"

namespace reefsim {

namespace fs = std::filesystem;

std::string format_exact(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Indicators indicators(const RunResult& result) {
  Indicators out;
  const WorldGrid& world = result.world;
  const double years = Clock::years_for_ticks(result.config.horizon_ticks);

  out.rasters.n_rows = world.n_rows;
  out.rasters.n_cols = world.n_cols;
  const std::size_t n = static_cast<std::size_t>(world.size());
  out.rasters.biomass_variation.assign(n, kRasterSentinel);
  out.rasters.annual_catch.assign(n, kRasterSentinel);
  out.rasters.annual_conflicts_day.assign(n, kRasterSentinel);
  out.rasters.annual_conflicts_night.assign(n, kRasterSentinel);

  double initial_total = 0.0, final_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fishable(world.cells[i].habitat)) continue;
    double initial = 0.0, final_b = 0.0;
    for (int g = 0; g < kFishGroupCount; ++g) {
      initial += result.accum.initial_biomass[static_cast<std::size_t>(g)][i];
      final_b += result.accum.final_biomass[static_cast<std::size_t>(g)][i];
    }
    initial_total += initial;
    final_total += final_b;
    if (initial > 0.0) out.rasters.biomass_variation[i] = final_b / initial;
    if (years > 0.0) {
      out.rasters.annual_catch[i] = from_nanokg(result.accum.catch_nanokg[i]) / years;
      out.rasters.annual_conflicts_day[i] = result.accum.conflicts_day[i] / years;
      out.rasters.annual_conflicts_night[i] = result.accum.conflicts_night[i] / years;
    }
  }

  out.global.years = years;
  out.global.n_fishers = result.n_fishers;
  out.global.total_catch_kg = result.total_catch_kg();
  out.global.total_conflicts = result.total_conflicts();
  if (initial_total > 0.0)
    out.global.biomass_variation = final_total / initial_total;
  if (result.n_fishers > 0 && years > 0.0) {
    out.global.annual_catch_per_fisher =
        out.global.total_catch_kg / years / result.n_fishers;
    out.global.annual_conflicts_per_fisher =
        static_cast<double>(out.global.total_conflicts) / years / result.n_fishers;
  }
  return out;
}

std::vector<DistrictIndicator> district_indicators(const RunResult& result,
                                                   const Population& pop) {
  const double years = Clock::years_for_ticks(result.config.horizon_ticks);
  if (years <= 0.0) return {};

  std::map<int, DistrictIndicator> by_district;
  std::vector<int> fisher_district;
  for (const Fisher& f : pop.fishers) {
    if (f.household < 0 || f.household >= static_cast<int>(pop.households.size()))
      throw ValidationError("fisher refers to an unknown household");
    const int d = pop.households[static_cast<std::size_t>(f.household)].district;
    if (static_cast<int>(fisher_district.size()) <= f.id)
      fisher_district.resize(static_cast<std::size_t>(f.id) + 1, -1);
    fisher_district[static_cast<std::size_t>(f.id)] = d;
  }

  // Fisher counts reflect the roster that actually ran (scenario applied).
  std::map<int, int> active_count;
  for (const TripOutcome& t : result.trips) {
    const int d = fisher_district[static_cast<std::size_t>(t.fisher_id)];
    DistrictIndicator& row = by_district[d];
    row.district = d;
    row.annual_catch_per_fisher += t.catch_kg;
    row.annual_conflicts_per_fisher += t.conflicts_fisher + t.conflicts_tourism;
  }
  for (std::size_t i = 0; i < pop.fishers.size() &&
                          static_cast<int>(i) < result.n_fishers; ++i) {
    const int d = fisher_district[static_cast<std::size_t>(pop.fishers[i].id)];
    active_count[d] += 1;
    by_district[d].district = d;
  }

  std::vector<DistrictIndicator> rows;
  for (auto& [d, row] : by_district) {
    row.n_fishers = active_count.count(d) ? active_count[d] : 0;
    if (row.n_fishers > 0) {
      row.annual_catch_per_fisher /= years * row.n_fishers;
      row.annual_conflicts_per_fisher /= years * row.n_fishers;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<DistrictIndicator> aggregate_by_commune(
    const std::vector<DistrictIndicator>& rows,
    const std::vector<std::pair<int, int>>& district_to_commune) {
  std::map<int, int> mapping(district_to_commune.begin(), district_to_commune.end());
  std::map<int, DistrictIndicator> by_commune;
  for (const DistrictIndicator& row : rows) {
    auto it = mapping.find(row.district);
    const int commune = it == mapping.end() ? row.district : it->second;
    DistrictIndicator& agg = by_commune[commune];
    agg.district = commune;
    // Back to totals, merge, then normalize once at the end.
    agg.annual_catch_per_fisher += row.annual_catch_per_fisher * row.n_fishers;
    agg.annual_conflicts_per_fisher +=
        row.annual_conflicts_per_fisher * row.n_fishers;
    agg.n_fishers += row.n_fishers;
  }
  std::vector<DistrictIndicator> out;
  for (auto& [c, agg] : by_commune) {
    if (agg.n_fishers > 0) {
      agg.annual_catch_per_fisher /= agg.n_fishers;
      agg.annual_conflicts_per_fisher /= agg.n_fishers;
    }
    out.push_back(agg);
  }
  return out;
}

std::vector<std::pair<int, int>> load_commune_map(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open commune map: " + file.string());
  std::vector<std::pair<int, int>> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("commune map: bad row '" + line + "'");
    out.emplace_back(std::stoi(line.substr(0, comma)),
                     std::stoi(line.substr(comma + 1)));
  }
  return out;
}

namespace {

std::optional<double> ratio_of(std::optional<double> variant,
                               std::optional<double> base) {
  if (!variant || !base || *base == 0.0) return std::nullopt;
  return *variant / *base;
}

void ratio_raster(const std::vector<double>& base,
                  const std::vector<double>& variant, std::vector<double>& out) {
  out.assign(base.size(), kRasterSentinel);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i] == kRasterSentinel || variant[i] == kRasterSentinel) continue;
    if (base[i] <= 0.0) continue;
    out[i] = variant[i] / base[i];
  }
}

std::string opt_str(std::optional<double> v) {
  return v ? format_exact(*v) : std::string("na");
}

}  // namespace

Comparison compare(const RunResult& base, const RunResult& variant) {
  if (base.world.n_rows != variant.world.n_rows ||
      base.world.n_cols != variant.world.n_cols)
    throw ValidationError("compare: runs use different grids");
  if (!(base.scenario.disturbance == variant.scenario.disturbance))
    throw ValidationError("compare: runs use different disturbance settings");

  Comparison cmp;
  cmp.base = indicators(base);
  cmp.variant = indicators(variant);
  cmp.ratios.biomass_variation = ratio_of(cmp.variant.global.biomass_variation,
                                          cmp.base.global.biomass_variation);
  cmp.ratios.annual_catch = ratio_of(cmp.variant.global.annual_catch_per_fisher,
                                     cmp.base.global.annual_catch_per_fisher);
  cmp.ratios.annual_conflicts =
      ratio_of(cmp.variant.global.annual_conflicts_per_fisher,
               cmp.base.global.annual_conflicts_per_fisher);

  cmp.ratio_rasters.n_rows = cmp.base.rasters.n_rows;
  cmp.ratio_rasters.n_cols = cmp.base.rasters.n_cols;
  ratio_raster(cmp.base.rasters.biomass_variation,
               cmp.variant.rasters.biomass_variation,
               cmp.ratio_rasters.biomass_variation);
  ratio_raster(cmp.base.rasters.annual_catch, cmp.variant.rasters.annual_catch,
               cmp.ratio_rasters.annual_catch);
  ratio_raster(cmp.base.rasters.annual_conflicts_day,
               cmp.variant.rasters.annual_conflicts_day,
               cmp.ratio_rasters.annual_conflicts_day);
  ratio_raster(cmp.base.rasters.annual_conflicts_night,
               cmp.variant.rasters.annual_conflicts_night,
               cmp.ratio_rasters.annual_conflicts_night);
  return cmp;
}

namespace {

void write_manifest(const RunResult& result, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write manifest: " + file.string());
  const ScenarioConfig& sc = result.scenario;
  const SimConfig& cfg = result.config;
  out << "version = " << kCodeVersion << '\n'
      << "seed = " << result.seed << '\n'
      << "horizon_ticks = " << cfg.horizon_ticks << '\n'
      << "years = " << format_exact(Clock::years_for_ticks(cfg.horizon_ticks)) << '\n'
      << "n_fishers = " << result.n_fishers << '\n'
      << "world.n_rows = " << result.world.n_rows << '\n'
      << "world.n_cols = " << result.world.n_cols << '\n'
      << "world.cell_size_m = " << format_exact(result.world.cell_size_m) << '\n'
      << "scenario = " << to_string(sc.name) << '\n'
      << "scenario.quota_kg_per_day = "
      << (sc.quota_kg_per_day ? format_exact(*sc.quota_kg_per_day) : "none") << '\n'
      << "scenario.poaching_override = "
      << (sc.poaching_override ? format_exact(*sc.poaching_override) : "none") << '\n'
      << "scenario.radius_multiplier = " << format_exact(sc.radius_multiplier) << '\n'
      << "scenario.night_ban = " << (sc.night_ban ? "true" : "false") << '\n'
      << "scenario.fisher_count_multiplier = "
      << format_exact(sc.fisher_count_multiplier) << '\n'
      << "disturbance = " << (sc.disturbance.enabled ? "on" : "off") << '\n'
      << "disturbance.start_day = " << sc.disturbance.start_day << '\n'
      << "disturbance.duration_days = " << sc.disturbance.duration_days << '\n'
      << "config.dt_days = " << format_exact(cfg.dt_days) << '\n'
      << "config.surveillance = " << format_exact(cfg.surveillance) << '\n'
      << "config.capture_rate_day_per_hour = "
      << format_exact(cfg.capture_rate_day_per_hour) << '\n'
      << "config.tourism_conflict_threshold = "
      << format_exact(cfg.tourism_conflict_threshold) << '\n'
      << "config.spillover_threshold = " << format_exact(cfg.spillover_threshold) << '\n'
      << "config.fishing_mortality_mode = " << to_string(cfg.fishing_mortality_mode) << '\n'
      << "config.choice_rule = " << to_string(cfg.choice_rule) << '\n';
}

void write_timeseries(const RunResult& result, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write timeseries: " + file.string());
  const TimeSeries& s = result.series;
  out << "tick,kind,coral_lagoon,turf_lagoon,coral_slope,turf_slope";
  for (const char* g : kFishGroupNames)
    out << ',' << g << "_all," << g << "_mpa," << g << "_outside," << g
        << "_lagoon," << g << "_slope";
  out << ",catch_kg,conflicts_fisher,conflicts_tourism,"
         "spillover_mpa_export,spillover_mpa_import\n";
  for (std::size_t row = 0; row < s.rows(); ++row) {
    const char* kind =
        row == 0 ? "-"
                 : (Clock::kind_of(static_cast<int>(row) - 1) == TickKind::Day
                        ? "day"
                        : "night");
    out << row << ',' << kind << ',' << format_exact(s.coral_lagoon[row]) << ','
        << format_exact(s.turf_lagoon[row]) << ','
        << format_exact(s.coral_slope[row]) << ','
        << format_exact(s.turf_slope[row]);
    for (int g = 0; g < kFishGroupCount; ++g) {
      const std::size_t sg = static_cast<std::size_t>(g);
      out << ',' << format_exact(s.mean_all[sg][row]) << ','
          << format_exact(s.mean_mpa[sg][row]) << ','
          << format_exact(s.mean_outside[sg][row]) << ','
          << format_exact(s.mean_lagoon[sg][row]) << ','
          << format_exact(s.mean_slope[sg][row]);
    }
    out << ',' << format_exact(s.catch_kg[row]) << ',' << s.conflicts_fisher[row]
        << ',' << s.conflicts_tourism[row] << ','
        << format_exact(s.spillover_mpa_export[row]) << ','
        << format_exact(s.spillover_mpa_import[row]) << '\n';
  }
}

void write_global(const GlobalIndicators& g, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write global.csv: " + file.string());
  out << "indicator,value\n"
      << "biomass_variation," << opt_str(g.biomass_variation) << '\n'
      << "annual_catch_per_fisher_kg," << opt_str(g.annual_catch_per_fisher) << '\n'
      << "annual_conflicts_per_fisher," << opt_str(g.annual_conflicts_per_fisher) << '\n'
      << "total_catch_kg," << format_exact(g.total_catch_kg) << '\n'
      << "total_conflicts," << g.total_conflicts << '\n'
      << "n_fishers," << g.n_fishers << '\n'
      << "years," << format_exact(g.years) << '\n';
}

}  // namespace

void export_run(const RunResult& result, const Indicators& ind,
                const std::vector<DistrictIndicator>& districts,
                const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_timeseries(result, out_dir / "timeseries.csv");
  write_global(ind.global, out_dir / "global.csv");
  write_manifest(result, out_dir / "manifest.txt");

  const IndicatorRasters& r = ind.rasters;
  write_layer(out_dir / "raster_biomass_variation.asc", r.n_rows, r.n_cols,
              r.biomass_variation);
  write_layer(out_dir / "raster_annual_catch.asc", r.n_rows, r.n_cols,
              r.annual_catch);
  write_layer(out_dir / "raster_annual_conflicts_day.asc", r.n_rows, r.n_cols,
              r.annual_conflicts_day);
  write_layer(out_dir / "raster_annual_conflicts_night.asc", r.n_rows, r.n_cols,
              r.annual_conflicts_night);

  if (!districts.empty()) {
    std::ofstream out(out_dir / "districts.csv");
    if (!out) throw ValidationError("cannot write districts.csv");
    out << "district,n_fishers,annual_catch_per_fisher_kg,"
           "annual_conflicts_per_fisher\n";
    for (const DistrictIndicator& d : districts)
      out << d.district << ',' << d.n_fishers << ','
          << format_exact(d.annual_catch_per_fisher) << ','
          << format_exact(d.annual_conflicts_per_fisher) << '\n';
  }
}

void export_comparison(const Comparison& comparison, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "ratios.csv");
    if (!out) throw ValidationError("cannot write ratios.csv");
    out << "indicator,base,variant,ratio\n";
    out << "biomass_variation," << opt_str(comparison.base.global.biomass_variation)
        << ',' << opt_str(comparison.variant.global.biomass_variation) << ','
        << opt_str(comparison.ratios.biomass_variation) << '\n';
    out << "annual_catch_per_fisher_kg,"
        << opt_str(comparison.base.global.annual_catch_per_fisher) << ','
        << opt_str(comparison.variant.global.annual_catch_per_fisher) << ','
        << opt_str(comparison.ratios.annual_catch) << '\n';
    out << "annual_conflicts_per_fisher,"
        << opt_str(comparison.base.global.annual_conflicts_per_fisher) << ','
        << opt_str(comparison.variant.global.annual_conflicts_per_fisher) << ','
        << opt_str(comparison.ratios.annual_conflicts) << '\n';
  }
  const IndicatorRasters& r = comparison.ratio_rasters;
  write_layer(out_dir / "raster_ratio_biomass_variation.asc", r.n_rows, r.n_cols,
              r.biomass_variation);
  write_layer(out_dir / "raster_ratio_annual_catch.asc", r.n_rows, r.n_cols,
              r.annual_catch);
  write_layer(out_dir / "raster_ratio_annual_conflicts_day.asc", r.n_rows,
              r.n_cols, r.annual_conflicts_day);
  write_layer(out_dir / "raster_ratio_annual_conflicts_night.asc", r.n_rows,
              r.n_cols, r.annual_conflicts_night);
}

void write_trip_log(const RunResult& result, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write trip log: " + file.string());
  out << "tick,fisher,cell,pre_relocation_cell,relocated,poached,catch_kg,"
         "conflicts_fisher,conflicts_tourism\n";
  for (const TripOutcome& t : result.trips)
    out << t.tick << ',' << t.fisher_id << ',' << t.cell << ','
        << t.pre_relocation_cell << ',' << (t.relocated ? 1 : 0) << ','
        << (t.poached ? 1 : 0) << ',' << format_exact(t.catch_kg) << ','
        << static_cast<int>(t.conflicts_fisher) << ','
        << static_cast<int>(t.conflicts_tourism) << '\n';
}

}  // namespace reefsim
