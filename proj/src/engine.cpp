#include "reefsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>
#include <map>
#include <thread>

namespace reefsim {

FishingMortalityMode fishing_mode_from_string(const std::string& s) {
  if (s == "discrete" || s == "discrete_capture") return FishingMortalityMode::DiscreteCapture;
  if (s == "lv" || s == "lv_term") return FishingMortalityMode::LvTerm;
  if (s == "both") return FishingMortalityMode::Both;
  throw ValidationError("unknown fishing mortality mode '" + s + "'");
}

std::string to_string(FishingMortalityMode m) {
  switch (m) {
    case FishingMortalityMode::DiscreteCapture: return "discrete";
    case FishingMortalityMode::LvTerm: return "lv";
    case FishingMortalityMode::Both: return "both";
  }
  return "?";
}

ChoiceRule choice_rule_from_string(const std::string& s) {
  if (s == "roulette") return ChoiceRule::Roulette;
  if (s == "argmax") return ChoiceRule::Argmax;
  throw ValidationError("unknown choice rule '" + s + "'");
}

std::string to_string(ChoiceRule r) {
  return r == ChoiceRule::Roulette ? "roulette" : "argmax";
}

void SimConfig::validate() const {
  if (horizon_ticks < 0) throw ValidationError("negative horizon");
  if (dt_days <= 0.0) throw ValidationError("dt_days must be positive");
  if (surveillance < 0.0) throw ValidationError("negative surveillance");
  if (capture_rate_day_per_hour < 0.0) throw ValidationError("negative capture rate");
  if (spillover_threshold <= 0.0 || spillover_threshold > 1.0)
    throw ValidationError("spillover threshold must be in (0, 1]");
  if (ecology_threads < 1) throw ValidationError("ecology_threads must be >= 1");
}

double RunResult::total_catch_kg() const {
  std::int64_t nano = 0;
  for (std::int64_t v : accum.catch_nanokg) nano += v;
  return from_nanokg(nano);
}

long RunResult::total_conflicts() const {
  long n = 0;
  for (std::int32_t v : accum.conflicts_day) n += v;
  for (std::int32_t v : accum.conflicts_night) n += v;
  return n;
}

namespace {

// Candidate cells reachable from one departure cell at one radius, with the
// static part of the choice score precomputed. Non-MPA candidates come
// first so the poaching gate is a span length, not a filter.
struct Zone {
  std::vector<int> cells;
  std::vector<double> dist;
  std::vector<double> static_day;    // (pref_c + tour_c) + dist_c
  std::vector<double> static_night;  // tourism criterion is 1 at night
  std::size_t n_non_mpa = 0;
  std::vector<std::uint8_t> member;  // per world cell
};

struct ZoneKey {
  int origin;
  double radius;
  bool operator<(const ZoneKey& o) const {
    if (origin != o.origin) return origin < o.origin;
    return radius < o.radius;
  }
};

class ZoneCache {
public:
  ZoneCache(const WorldGrid& world, const LayerMaxima& maxima)
      : world_(world), maxima_(maxima) {}

  const Zone& get(int origin, double radius_m) {
    const ZoneKey key{origin, radius_m};
    auto it = zones_.find(key);
    if (it != zones_.end()) return it->second;

    const DistanceField& field = distance_cache_.get(world_, origin);
    Zone zone;
    zone.member.assign(static_cast<std::size_t>(world_.size()), 0);
    std::vector<int> reach = reachable_fishable_cells(world_, field, radius_m);
    // Non-MPA first, ascending index inside each part.
    for (int pass = 0; pass < 2; ++pass)
      for (int cell : reach)
        if ((world_.at(cell).mpa ? 1 : 0) == pass) zone.cells.push_back(cell);
    zone.n_non_mpa = 0;
    for (int cell : reach)
      if (!world_.at(cell).mpa) ++zone.n_non_mpa;

    Fisher probe;  // score_cell only reads radius_m from the fisher
    probe.radius_m = radius_m;
    zone.dist.reserve(zone.cells.size());
    for (int cell : zone.cells) {
      const double d = field.dist_m[static_cast<std::size_t>(cell)];
      zone.dist.push_back(d);
      zone.member[static_cast<std::size_t>(cell)] = 1;
      const Cell& c = world_.at(cell);
      const double pref_c = direct_criterion(c.preference, maxima_.preference_max);
      const double dist_c = 1.0 - std::log2(d / radius_m + 1.0);
      const double tour_day = inverse_criterion(c.tourism, maxima_.tourism_max);
      zone.static_day.push_back((pref_c + tour_day) + dist_c);
      zone.static_night.push_back((pref_c + 1.0) + dist_c);
    }
    return zones_.emplace(key, std::move(zone)).first->second;
  }

private:
  const WorldGrid& world_;
  LayerMaxima maxima_;
  DistanceFieldCache distance_cache_;
  std::map<ZoneKey, Zone> zones_;
};

void ecology_pass(const WorldGrid& world, std::vector<Cell>& next,
                  const CalibratedParams& params, const SimConfig& config,
                  const std::vector<int>& lv_fishers, bool disturbance_on) {
  const int n = world.size();
  auto run_chunk = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      Cell cell = world.at(i);
      const bool cots =
          disturbance_on && cell.habitat == HabitatClass::OuterSlope;
      step_cell(cell, params.for_cell(i), config.dt_days,
                lv_fishers[static_cast<std::size_t>(i)], cots);
      next[static_cast<std::size_t>(i)] = cell;
    }
  };

  const int threads = std::min(config.ecology_threads, n);
  if (threads <= 1) {
    run_chunk(0, n);
    return;
  }
  // Disjoint output slots, read-only input: chunking cannot change results.
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(run_chunk, begin, end);
  }
  for (std::thread& t : pool) t.join();
}

struct CategoryCounts {
  int fishable = 0, mpa = 0, outside = 0, lagoon = 0, slope = 0;
  int lagoon_cells = 0, slope_cells = 0;  // all cells of the habitat
};

CategoryCounts count_categories(const WorldGrid& world) {
  CategoryCounts n;
  for (const Cell& c : world.cells) {
    if (c.habitat == HabitatClass::Lagoon) ++n.lagoon_cells;
    if (c.habitat == HabitatClass::OuterSlope) ++n.slope_cells;
    if (!fishable(c.habitat)) continue;
    ++n.fishable;
    (c.mpa ? n.mpa : n.outside)++;
    if (c.habitat == HabitatClass::Lagoon) ++n.lagoon;
    if (c.habitat == HabitatClass::OuterSlope) ++n.slope;
  }
  return n;
}

}  // namespace

RunResult run(const WorldGrid& initial_world, const std::vector<Fisher>& population,
              const ScenarioConfig& scenario, const CalibratedParams& params,
              const SimConfig& config, std::uint64_t seed) {
  config.validate();
  scenario.validate();
  if (!params.per_cell.empty() &&
      params.per_cell.size() != static_cast<std::size_t>(initial_world.size()))
    throw ValidationError("per-cell parameter table does not match the grid");

  RunResult result;
  result.world = initial_world;
  result.scenario = scenario;
  result.config = config;
  result.seed = seed;

  WorldGrid& world = result.world;
  const int n_cells = world.size();

  std::vector<Fisher> fishers = apply_scenario(scenario, population);
  result.n_fishers = static_cast<int>(fishers.size());

  // Static layer maxima over fishable cells; the biomass maximum is dynamic.
  LayerMaxima maxima;
  for (const Cell& c : world.cells) {
    if (!fishable(c.habitat)) continue;
    maxima.preference_max = std::max(maxima.preference_max, c.preference);
    maxima.tourism_max = std::max(maxima.tourism_max, c.tourism);
  }
  ZoneCache zones(world, maxima);
  for (const Fisher& f : fishers) zones.get(f.departure_cell, f.radius_m);

  const CategoryCounts counts = count_categories(world);

  // Accumulators.
  result.accum.catch_nanokg.assign(static_cast<std::size_t>(n_cells), 0);
  result.accum.conflicts_day.assign(static_cast<std::size_t>(n_cells), 0);
  result.accum.conflicts_night.assign(static_cast<std::size_t>(n_cells), 0);
  for (int g = 0; g < kFishGroupCount; ++g) {
    auto& initial = result.accum.initial_biomass[static_cast<std::size_t>(g)];
    initial.assign(static_cast<std::size_t>(n_cells), 0.0);
    for (int i = 0; i < n_cells; ++i)
      initial[static_cast<std::size_t>(i)] = world.at(i).fish[static_cast<std::size_t>(g)];
  }

  TimeSeries& series = result.series;
  const std::size_t n_rows = static_cast<std::size_t>(config.horizon_ticks) + 1;
  auto reserve_all = [&](auto& vec) { vec.reserve(n_rows); };
  reserve_all(series.coral_lagoon);
  reserve_all(series.catch_kg);

  auto record_row = [&](double catch_kg, int conf_fisher, int conf_tourism,
                        double mpa_export, double mpa_import) {
    double coral_lag = 0, turf_lag = 0, coral_slp = 0, turf_slp = 0;
    std::array<double, kFishGroupCount> all{}, mpa{}, out{}, lag{}, slp{};
    for (int i = 0; i < n_cells; ++i) {
      const Cell& c = world.at(i);
      if (c.habitat == HabitatClass::Lagoon) {
        coral_lag += c.coral;
        turf_lag += c.turf;
      } else if (c.habitat == HabitatClass::OuterSlope) {
        coral_slp += c.coral;
        turf_slp += c.turf;
      }
      if (!fishable(c.habitat)) continue;
      for (int g = 0; g < kFishGroupCount; ++g) {
        const double b = c.fish[static_cast<std::size_t>(g)];
        all[static_cast<std::size_t>(g)] += b;
        (c.mpa ? mpa : out)[static_cast<std::size_t>(g)] += b;
        if (c.habitat == HabitatClass::Lagoon) lag[static_cast<std::size_t>(g)] += b;
        if (c.habitat == HabitatClass::OuterSlope) slp[static_cast<std::size_t>(g)] += b;
      }
      // Invariant audit, cheap enough to keep on for every run.
      const double over_cap = (c.coral + c.turf) - c.substrate_cap;
      result.max_substrate_excess = std::max(result.max_substrate_excess, over_cap);
      for (int g = 0; g < kFishGroupCount; ++g)
        result.max_carrying_excess =
            std::max(result.max_carrying_excess,
                     c.fish[static_cast<std::size_t>(g)] -
                         c.carrying[static_cast<std::size_t>(g)]);
    }
    auto mean = [](double sum, int n) { return n > 0 ? sum / n : 0.0; };
    series.coral_lagoon.push_back(mean(coral_lag, counts.lagoon_cells));
    series.turf_lagoon.push_back(mean(turf_lag, counts.lagoon_cells));
    series.coral_slope.push_back(mean(coral_slp, counts.slope_cells));
    series.turf_slope.push_back(mean(turf_slp, counts.slope_cells));
    for (int g = 0; g < kFishGroupCount; ++g) {
      const std::size_t sg = static_cast<std::size_t>(g);
      series.mean_all[sg].push_back(mean(all[sg], counts.fishable));
      series.mean_mpa[sg].push_back(mean(mpa[sg], counts.mpa));
      series.mean_outside[sg].push_back(mean(out[sg], counts.outside));
      series.mean_lagoon[sg].push_back(mean(lag[sg], counts.lagoon));
      series.mean_slope[sg].push_back(mean(slp[sg], counts.slope));
    }
    series.catch_kg.push_back(catch_kg);
    series.conflicts_fisher.push_back(conf_fisher);
    series.conflicts_tourism.push_back(conf_tourism);
    series.spillover_mpa_export.push_back(mpa_export);
    series.spillover_mpa_import.push_back(mpa_import);
  };

  record_row(0.0, 0, 0, 0.0, 0.0);  // initial snapshot

  Rng rng(seed);
  std::vector<Cell> next_cells(static_cast<std::size_t>(n_cells));
  std::vector<int> occupancy(static_cast<std::size_t>(n_cells), 0);
  std::vector<int> lv_fishers(static_cast<std::size_t>(n_cells), 0);
  std::vector<double> biom_c(static_cast<std::size_t>(n_cells), 0.0);
  std::vector<int> order(fishers.size());
  for (std::size_t i = 0; i < fishers.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<double> weights;

  const bool lv_mode = config.fishing_mortality_mode != FishingMortalityMode::DiscreteCapture;
  const bool capture_mode = config.fishing_mortality_mode != FishingMortalityMode::LvTerm;

  for (int tick = 0; tick < config.horizon_ticks; ++tick) {
    const TickKind kind = Clock::kind_of(tick);
    const bool disturbance_on =
        scenario.disturbance.active_on_day(Clock::day_of(tick));

    // 1-2) Ecology on every cell from the frozen snapshot.
    ecology_pass(world, next_cells, params, config, lv_fishers, disturbance_on);
    world.cells.swap(next_cells);

    // 3) Spillover, itself snapshot-based.
    const SpilloverReport spill = apply_spillover(world, config.spillover_threshold);
    for (int g = 0; g < kFishGroupCount; ++g) {
      const std::size_t sg = static_cast<std::size_t>(g);
      if (spill.total_before[sg] > 0.0) {
        const double rel = std::abs(spill.total_after[sg] - spill.total_before[sg]) /
                           spill.total_before[sg];
        result.max_spillover_imbalance = std::max(result.max_spillover_imbalance, rel);
      }
    }

    // 4) Fishers, sequentially, in a freshly shuffled order. Scores read the
    // post-spillover snapshot; catches update cells live.
    double biomass_max = 0.0;
    for (int i = 0; i < n_cells; ++i)
      if (fishable(world.at(i).habitat))
        biomass_max = std::max(biomass_max, world.at(i).fishable_biomass());
    for (int i = 0; i < n_cells; ++i)
      biom_c[static_cast<std::size_t>(i)] =
          fishable(world.at(i).habitat)
              ? direct_criterion(world.at(i).fishable_biomass(), biomass_max)
              : 0.0;

    std::fill(occupancy.begin(), occupancy.end(), 0);
    rng.shuffle(order);

    std::int64_t tick_catch_nano = 0;
    int tick_conf_fisher = 0, tick_conf_tourism = 0;

    for (int fisher_idx : order) {
      Fisher& fisher = fishers[static_cast<std::size_t>(fisher_idx)];
      if (!decide_trip(fisher, kind, rng)) continue;

      const double p_poach =
          scenario.poaching_override
              ? *scenario.poaching_override
              : poaching_probability(fisher, kind, config.surveillance);
      const bool mpa_allowed = rng.bernoulli(p_poach);

      const Zone& zone = zones.get(fisher.departure_cell, fisher.radius_m);
      const std::size_t n_cand = mpa_allowed ? zone.cells.size() : zone.n_non_mpa;
      if (n_cand == 0) continue;  // nowhere to go: no trip

      const std::vector<double>& statics =
          kind == TickKind::Day ? zone.static_day : zone.static_night;
      weights.resize(n_cand);
      for (std::size_t k = 0; k < n_cand; ++k) {
        const int cell = zone.cells[k];
        const double bump = occupancy[static_cast<std::size_t>(cell)] > 0 ? 0.2 : 0.4;
        weights[k] = (statics[k] + biom_c[static_cast<std::size_t>(cell)]) + bump;
      }
      const int pick = config.choice_rule == ChoiceRule::Roulette
                           ? roulette_pick(weights, rng)
                           : argmax_pick(weights, rng);
      const int chosen = zone.cells[static_cast<std::size_t>(pick)];

      const auto [conf_fisher, conf_tourism] = record_conflicts(
          occupancy[static_cast<std::size_t>(chosen)], world.at(chosen).tourism,
          kind, config.tourism_conflict_threshold);

      auto eligible = [&](int cell) {
        if (!zone.member[static_cast<std::size_t>(cell)]) return false;
        return mpa_allowed || !world.at(cell).mpa;
      };
      const RelocationResult reloc =
          resolve_relocation(world, chosen, occupancy, eligible, rng);
      occupancy[static_cast<std::size_t>(reloc.cell)] += 1;

      double catch_kg = 0.0;
      if (capture_mode)
        catch_kg = fish(fisher, world.at(reloc.cell), kind,
                        config.capture_rate_day_per_hour, scenario.quota_kg_per_day);

      TripOutcome outcome;
      outcome.fisher_id = fisher.id;
      outcome.tick = tick;
      outcome.cell = reloc.cell;
      outcome.pre_relocation_cell = chosen;
      outcome.relocated = reloc.relocated;
      outcome.poached = world.at(reloc.cell).mpa;
      outcome.catch_kg = catch_kg;
      outcome.conflicts_fisher = static_cast<std::uint8_t>(conf_fisher);
      outcome.conflicts_tourism = static_cast<std::uint8_t>(conf_tourism);
      if (config.keep_trip_log) result.trips.push_back(outcome);

      const std::int64_t nano = to_nanokg(catch_kg);
      result.accum.catch_nanokg[static_cast<std::size_t>(reloc.cell)] += nano;
      tick_catch_nano += nano;
      auto& conflict_cells = kind == TickKind::Day ? result.accum.conflicts_day
                                                   : result.accum.conflicts_night;
      conflict_cells[static_cast<std::size_t>(chosen)] +=
          conf_fisher + conf_tourism;
      tick_conf_fisher += conf_fisher;
      tick_conf_tourism += conf_tourism;
    }

    if (lv_mode) lv_fishers = occupancy;

    // 5) Accounting.
    record_row(from_nanokg(tick_catch_nano), tick_conf_fisher, tick_conf_tourism,
               spill.mpa_to_outside, spill.outside_to_mpa);

    if (config.log_every_ticks > 0 && (tick + 1) % config.log_every_ticks == 0) {
      std::cerr << "tick " << tick + 1 << "/" << config.horizon_ticks << " (year "
                << Clock::years_for_ticks(tick + 1) << ") catch="
                << from_nanokg(tick_catch_nano) << " kg\n";
    }
  }

  for (int g = 0; g < kFishGroupCount; ++g) {
    auto& final_b = result.accum.final_biomass[static_cast<std::size_t>(g)];
    final_b.assign(static_cast<std::size_t>(n_cells), 0.0);
    for (int i = 0; i < n_cells; ++i)
      final_b[static_cast<std::size_t>(i)] = world.at(i).fish[static_cast<std::size_t>(g)];
  }
  return result;
}

std::pair<RunResult, RunResult> run_pair(const WorldGrid& world,
                                         const std::vector<Fisher>& population,
                                         const ScenarioConfig& base,
                                         const ScenarioConfig& variant,
                                         const CalibratedParams& params,
                                         const SimConfig& config,
                                         std::uint64_t seed) {
  if (!(base.disturbance == variant.disturbance))
    throw ValidationError(
        "run_pair: scenarios must share the same disturbance setting");
  RunResult a = run(world, population, base, params, config, seed);
  RunResult b = run(world, population, variant, params, config, seed);
  return {std::move(a), std::move(b)};
}

}  // namespace reefsim
