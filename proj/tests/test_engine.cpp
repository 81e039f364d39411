#include <doctest.h>

#include <cmath>
#include <map>

#include "reefsim/engine.hpp"
#include "reefsim/island.hpp"
#include "reefsim/metrics.hpp"

using namespace reefsim;

namespace {

struct Fixture {
  WorldGrid world;
  Population pop;
  CalibratedParams params;
  SimConfig config;

  explicit Fixture(int fishers = 80, double years = 1.0) {
    IslandSpec spec;
    spec.n_rows = spec.n_cols = 40;
    spec.n_districts = 4;
    spec.n_mpas = 2;
    world = generate_synthetic_island(spec, 3);
    pop = generate_population(world,
                              make_default_district_table(world, fishers, 1), 11);
    params = calibrate(world, GrowthRates{}, {},
                       static_cast<double>(pop.fishers.size()) /
                           world.count_fishable());
    config.horizon_ticks = Clock::ticks_for_years(years);
  }
};

WorldGrid uniform_lagoon(int rows, int cols) {
  WorldGrid w;
  w.n_rows = rows;
  w.n_cols = cols;
  w.cells.assign(static_cast<std::size_t>(rows * cols), Cell{});
  for (Cell& c : w.cells) {
    c.habitat = HabitatClass::Lagoon;
    c.coral = 0.26;
    c.turf = 0.20;
    c.macroalgae = 0.03;
    c.fish = {305.0, 25.3, 78.5};
    c.preference = 1.0;
  }
  w.finalize_initial_state();
  return w;
}

bool same_run(const RunResult& a, const RunResult& b) {
  if (a.world.cells != b.world.cells) return false;
  if (a.trips.size() != b.trips.size()) return false;
  for (std::size_t i = 0; i < a.trips.size(); ++i) {
    const TripOutcome &x = a.trips[i], &y = b.trips[i];
    if (x.fisher_id != y.fisher_id || x.tick != y.tick || x.cell != y.cell ||
        x.catch_kg != y.catch_kg || x.relocated != y.relocated ||
        x.poached != y.poached)
      return false;
  }
  return a.accum.catch_nanokg == b.accum.catch_nanokg &&
         a.series.catch_kg == b.series.catch_kg;
}

}  // namespace

TEST_CASE("clock parity: day first, two ticks a day") {
  CHECK(Clock::kind_of(0) == TickKind::Day);
  CHECK(Clock::kind_of(1) == TickKind::Night);
  CHECK(Clock::day_of(0) == 0);
  CHECK(Clock::day_of(1) == 0);
  CHECK(Clock::day_of(2) == 1);
  CHECK(Clock::ticks_for_years(20) == 14600);
}

TEST_CASE("horizon zero returns only the initial snapshot") {
  Fixture fx(20, 0.0);
  const RunResult r = run(fx.world, fx.pop.fishers,
                          scenario_preset(ScenarioName::StatuQuo), fx.params,
                          fx.config, 1);
  CHECK(r.series.rows() == 1);
  CHECK(r.trips.empty());
  CHECK(r.world.cells == fx.world.cells);
}

TEST_CASE("identical seeds and configs give identical runs, any thread count") {
  Fixture fx(60, 0.5);
  const ScenarioConfig sc = scenario_preset(ScenarioName::StatuQuo);
  const RunResult a = run(fx.world, fx.pop.fishers, sc, fx.params, fx.config, 5);
  const RunResult b = run(fx.world, fx.pop.fishers, sc, fx.params, fx.config, 5);
  CHECK(same_run(a, b));

  SimConfig threaded = fx.config;
  threaded.ecology_threads = 4;
  const RunResult c = run(fx.world, fx.pop.fishers, sc, fx.params, threaded, 5);
  CHECK(same_run(a, c));

  const RunResult d = run(fx.world, fx.pop.fishers, sc, fx.params, fx.config, 6);
  CHECK_FALSE(same_run(a, d));
}

TEST_CASE("no fishers and no disturbance hold the calibrated equilibrium") {
  WorldGrid w = uniform_lagoon(10, 10);
  const CalibratedParams params = calibrate(w, GrowthRates{}, {}, 0.0);
  SimConfig config;
  config.horizon_ticks = 1460;
  const RunResult r = run(w, {}, scenario_preset(ScenarioName::NoFishing), params,
                          config, 1);
  for (int i = 0; i < w.size(); ++i) {
    CHECK(r.world.at(i).coral == doctest::Approx(w.at(i).coral).epsilon(0.01));
    CHECK(r.world.at(i).turf == doctest::Approx(w.at(i).turf).epsilon(0.01));
    for (int g = 0; g < kFishGroupCount; ++g)
      CHECK(r.world.at(i).fish[static_cast<std::size_t>(g)] ==
            doctest::Approx(w.at(i).fish[static_cast<std::size_t>(g)]).epsilon(0.01));
  }
  CHECK(r.total_catch_kg() == 0.0);
}

TEST_CASE("disturbance window drives outer-slope coral, and only then") {
  Fixture fx(0, 0.0);
  ScenarioConfig on = scenario_preset(ScenarioName::NoFishing);
  on.disturbance.enabled = true;
  on.disturbance.start_day = 30;
  on.disturbance.duration_days = 60;
  ScenarioConfig off = scenario_preset(ScenarioName::NoFishing);

  SimConfig config = fx.config;
  config.horizon_ticks = 2 * 120;
  const RunResult with = run(fx.world, {}, on, fx.params, config, 1);
  const RunResult without = run(fx.world, {}, off, fx.params, config, 1);

  const auto& a = with.series.coral_slope;
  const auto& b = without.series.coral_slope;
  // Identical before onset; strictly lower during the window and after.
  for (int t = 0; t <= 60; ++t) CHECK(a[static_cast<std::size_t>(t)] == b[static_cast<std::size_t>(t)]);
  CHECK(a[100] < b[100]);
  CHECK(a[240] < b[240]);
  // Lagoon coral is untouched by the forcing itself.
  CHECK(with.series.coral_lagoon[100] ==
        doctest::Approx(without.series.coral_lagoon[100]).epsilon(1e-9));
}

TEST_CASE("trip audit: radius, gates, quota and corallivores") {
  Fixture fx(60, 1.0);

  SUBCASE("fished cells stay within the fisher's radius") {
    const RunResult r = run(fx.world, fx.pop.fishers,
                            scenario_preset(ScenarioName::StatuQuo), fx.params,
                            fx.config, 3);
    REQUIRE(!r.trips.empty());
    std::map<int, const Fisher*> by_id;
    for (const Fisher& f : fx.pop.fishers) by_id[f.id] = &f;
    DistanceFieldCache cache;
    for (const TripOutcome& t : r.trips) {
      const Fisher& f = *by_id.at(t.fisher_id);
      const DistanceField& field = cache.get(fx.world, f.departure_cell);
      CHECK(field.dist_m[static_cast<std::size_t>(t.cell)] <= f.radius_m);
      CHECK(fishable(fx.world.at(t.cell).habitat));
    }
  }

  SUBCASE("no poaching means no MPA catch, exactly") {
    const RunResult r = run(fx.world, fx.pop.fishers,
                            scenario_preset(ScenarioName::NoPoaching), fx.params,
                            fx.config, 3);
    for (const TripOutcome& t : r.trips) CHECK_FALSE(t.poached);
    for (int i = 0; i < fx.world.size(); ++i)
      if (fx.world.at(i).mpa)
        CHECK(r.accum.catch_nanokg[static_cast<std::size_t>(i)] == 0);
  }

  SUBCASE("quota caps every trip") {
    const RunResult r = run(fx.world, fx.pop.fishers,
                            scenario_preset(ScenarioName::Quota), fx.params,
                            fx.config, 3);
    for (const TripOutcome& t : r.trips) CHECK(t.catch_kg <= 5.0 + 1e-12);
  }

  SUBCASE("night ban raises day traffic and zeroes night conflicts") {
    const RunResult r = run(fx.world, fx.pop.fishers,
                            scenario_preset(ScenarioName::NightBan), fx.params,
                            fx.config, 3);
    for (const TripOutcome& t : r.trips) CHECK(Clock::kind_of(t.tick) == TickKind::Day);
    for (std::int32_t v : r.accum.conflicts_night) CHECK(v == 0);
  }
}

TEST_CASE("conflict bookkeeping replays from the trip log") {
  // Brute-force recount: walk the per-tick logs in action order, rebuild
  // occupancy, and re-derive both conflict flags for every trip.
  Fixture fx(50, 0.5);
  const RunResult r = run(fx.world, fx.pop.fishers,
                          scenario_preset(ScenarioName::StatuQuo), fx.params,
                          fx.config, 9);
  REQUIRE(!r.trips.empty());
  std::vector<int> occupancy(static_cast<std::size_t>(fx.world.size()), 0);
  int tick = -1;
  long fisher_conflicts = 0, tourism_conflicts = 0;
  for (const TripOutcome& t : r.trips) {
    if (t.tick != tick) {
      std::fill(occupancy.begin(), occupancy.end(), 0);
      tick = t.tick;
    }
    const int expected_cf =
        occupancy[static_cast<std::size_t>(t.pre_relocation_cell)] > 0 ? 1 : 0;
    const bool day = Clock::kind_of(t.tick) == TickKind::Day;
    const int expected_ct =
        day && fx.world.at(t.pre_relocation_cell).tourism > 0.0 ? 1 : 0;
    CHECK(t.conflicts_fisher == expected_cf);
    CHECK(t.conflicts_tourism == expected_ct);
    if (expected_cf == 0 && t.pre_relocation_cell == t.cell)
      CHECK_FALSE(t.relocated);
    occupancy[static_cast<std::size_t>(t.cell)] += 1;
    fisher_conflicts += t.conflicts_fisher;
    tourism_conflicts += t.conflicts_tourism;
  }
  CHECK(fisher_conflicts + tourism_conflicts == r.total_conflicts());
}

TEST_CASE("accounting identities hold bit-exactly") {
  Fixture fx(60, 1.0);
  const RunResult r = run(fx.world, fx.pop.fishers,
                          scenario_preset(ScenarioName::StatuQuo), fx.params,
                          fx.config, 7);
  std::int64_t by_cell = 0, by_tick = 0, by_trip = 0;
  for (std::int64_t v : r.accum.catch_nanokg) by_cell += v;
  for (double v : r.series.catch_kg) by_tick += to_nanokg(v);
  for (const TripOutcome& t : r.trips) by_trip += to_nanokg(t.catch_kg);
  CHECK(by_cell == by_tick);
  CHECK(by_cell == by_trip);

  long conflicts_cells = 0, conflicts_series = 0, conflicts_trips = 0;
  for (std::int32_t v : r.accum.conflicts_day) conflicts_cells += v;
  for (std::int32_t v : r.accum.conflicts_night) conflicts_cells += v;
  for (std::size_t i = 0; i < r.series.rows(); ++i)
    conflicts_series += r.series.conflicts_fisher[i] + r.series.conflicts_tourism[i];
  for (const TripOutcome& t : r.trips)
    conflicts_trips += t.conflicts_fisher + t.conflicts_tourism;
  CHECK(conflicts_cells == conflicts_series);
  CHECK(conflicts_cells == conflicts_trips);

  SUBCASE("audit fields stay clean") {
    CHECK(r.max_substrate_excess <= 0.0);
    CHECK(r.max_carrying_excess <= 0.0);
    CHECK(r.max_spillover_imbalance <= 1e-9);
  }
}

TEST_CASE("run_pair guards and baseline equality") {
  Fixture fx(40, 0.25);
  const ScenarioConfig sq = scenario_preset(ScenarioName::StatuQuo);

  SUBCASE("statu quo against itself is identical") {
    const auto [a, b] = run_pair(fx.world, fx.pop.fishers, sq, sq, fx.params,
                                 fx.config, 2);
    CHECK(same_run(a, b));
  }
  SUBCASE("no-fishing variant catches nothing while the base catches") {
    const auto [base, variant] =
        run_pair(fx.world, fx.pop.fishers, sq,
                 scenario_preset(ScenarioName::NoFishing), fx.params, fx.config, 2);
    CHECK(base.total_catch_kg() > 0.0);
    CHECK(variant.total_catch_kg() == 0.0);
  }
  SUBCASE("mismatched disturbance settings are rejected") {
    ScenarioConfig disturbed = scenario_preset(ScenarioName::Quota);
    disturbed.disturbance.enabled = true;
    CHECK_THROWS_WITH_AS(
        run_pair(fx.world, fx.pop.fishers, sq, disturbed, fx.params, fx.config, 2),
        doctest::Contains("disturbance"), ValidationError);
  }
}

TEST_CASE("lv-term mode applies fishing pressure through the equations") {
  Fixture fx(60, 1.0);
  SimConfig lv = fx.config;
  lv.fishing_mortality_mode = FishingMortalityMode::LvTerm;
  const RunResult r = run(fx.world, fx.pop.fishers,
                          scenario_preset(ScenarioName::StatuQuo), fx.params, lv, 3);
  // No discrete captures in this mode...
  CHECK(r.total_catch_kg() == 0.0);
  // ...but the fish still feel the fishers.
  const RunResult none = run(fx.world, {}, scenario_preset(ScenarioName::NoFishing),
                             fx.params, lv, 3);
  const std::size_t last = r.series.rows() - 1;
  CHECK(r.series.mean_all[kHerbivore][last] <
        none.series.mean_all[kHerbivore][last]);
}
