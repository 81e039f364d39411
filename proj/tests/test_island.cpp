#include <doctest.h>

#include <cmath>
#include <set>

#include "reefsim/island.hpp"
#include "reefsim/world.hpp"

using namespace reefsim;

namespace {

double layer_mean(const WorldGrid& w, HabitatClass habitat, double Cell::*field) {
  double sum = 0;
  int n = 0;
  for (const Cell& c : w.cells)
    if (c.habitat == habitat) {
      sum += c.*field;
      ++n;
    }
  return n ? sum / n : 0.0;
}

}  // namespace

TEST_CASE("synthetic island is deterministic per (spec, seed)") {
  IslandSpec spec;
  const WorldGrid a = generate_synthetic_island(spec, 7);
  const WorldGrid b = generate_synthetic_island(spec, 7);
  CHECK(a.cells == b.cells);
  const WorldGrid c = generate_synthetic_island(spec, 8);
  CHECK(a.cells != c.cells);
}

TEST_CASE("synthetic island structure") {
  IslandSpec spec;
  spec.n_passes = 2;
  const WorldGrid w = generate_synthetic_island(spec, 7);

  int counts[kHabitatCount] = {};
  for (const Cell& c : w.cells) counts[static_cast<int>(c.habitat)]++;
  CHECK(counts[static_cast<int>(HabitatClass::Land)] > 0);
  CHECK(counts[static_cast<int>(HabitatClass::Lagoon)] > 0);
  CHECK(counts[static_cast<int>(HabitatClass::ReefCrest)] > 0);
  CHECK(counts[static_cast<int>(HabitatClass::Pass)] > 0);
  CHECK(counts[static_cast<int>(HabitatClass::OuterSlope)] > 0);
  CHECK(counts[static_cast<int>(HabitatClass::OpenOcean)] > 0);

  SUBCASE("grid border is open ocean") {
    for (int c = 0; c < w.n_cols; ++c) {
      CHECK(w.at(0, c).habitat == HabitatClass::OpenOcean);
      CHECK(w.at(w.n_rows - 1, c).habitat == HabitatClass::OpenOcean);
    }
  }

  SUBCASE("the crest separates lagoon and slope except at passes") {
    // Turn the passes into crest: the slope must become unreachable from
    // the lagoon.
    WorldGrid sealed = w;
    for (Cell& c : sealed.cells)
      if (c.habitat == HabitatClass::Pass) c.habitat = HabitatClass::ReefCrest;
    int lagoon_origin = -1;
    for (int i = 0; i < sealed.size(); ++i)
      if (sealed.at(i).habitat == HabitatClass::Lagoon) {
        lagoon_origin = i;
        break;
      }
    REQUIRE(lagoon_origin >= 0);
    const DistanceField f = distance_field(sealed, lagoon_origin);
    for (int i = 0; i < sealed.size(); ++i)
      if (sealed.at(i).habitat == HabitatClass::OuterSlope)
        CHECK(std::isinf(f.dist_m[static_cast<std::size_t>(i)]));

    // With the passes back, some slope cell is reachable.
    const DistanceField g = distance_field(w, lagoon_origin);
    bool any = false;
    for (int i = 0; i < w.size(); ++i)
      if (w.at(i).habitat == HabitatClass::OuterSlope &&
          !std::isinf(g.dist_m[static_cast<std::size_t>(i)]))
        any = true;
    CHECK(any);
  }

  SUBCASE("districts cover everything but open ocean") {
    std::set<int> district_ids;
    for (const Cell& c : w.cells) {
      if (c.habitat == HabitatClass::OpenOcean) {
        CHECK(c.district == kNoDistrict);
      } else {
        CHECK(c.district >= 0);
        CHECK(c.district < spec.n_districts);
        district_ids.insert(c.district);
      }
    }
    CHECK(static_cast<int>(district_ids.size()) == spec.n_districts);
  }
}

TEST_CASE("MPA share of the lagoon hits the target band") {
  IslandSpec spec;
  const WorldGrid w = generate_synthetic_island(spec, 7);
  int lagoon = 0, lagoon_mpa = 0;
  for (const Cell& c : w.cells)
    if (c.habitat == HabitatClass::Lagoon) {
      ++lagoon;
      if (c.mpa) ++lagoon_mpa;
    }
  const double frac = static_cast<double>(lagoon_mpa) / lagoon;
  CHECK(frac >= 0.15);
  CHECK(frac <= 0.25);

  // MPAs always span slope cells too (lagoon+slope sectors).
  int slope_mpa = 0;
  for (const Cell& c : w.cells)
    if (c.habitat == HabitatClass::OuterSlope && c.mpa) ++slope_mpa;
  CHECK(slope_mpa > 0);
}

TEST_CASE("layer means match the requested values") {
  IslandSpec spec;
  const WorldGrid w = generate_synthetic_island(spec, 11);

  CHECK(layer_mean(w, HabitatClass::Lagoon, &Cell::coral) ==
        doctest::Approx(0.26).epsilon(0.05));
  CHECK(layer_mean(w, HabitatClass::Lagoon, &Cell::turf) ==
        doctest::Approx(0.20).epsilon(0.05));
  CHECK(layer_mean(w, HabitatClass::OuterSlope, &Cell::coral) ==
        doctest::Approx(0.44).epsilon(0.05));
  CHECK(layer_mean(w, HabitatClass::OuterSlope, &Cell::turf) ==
        doctest::Approx(0.33).epsilon(0.05));

  double herb = 0, coro = 0, carn = 0;
  int n = 0;
  for (const Cell& c : w.cells)
    if (fishable(c.habitat)) {
      herb += c.fish[kHerbivore];
      coro += c.fish[kCorallivore];
      carn += c.fish[kCarnivore];
      ++n;
    }
  CHECK(herb / n == doctest::Approx(305.0).epsilon(0.05));
  CHECK(coro / n == doctest::Approx(25.3).epsilon(0.05));
  CHECK(carn / n == doctest::Approx(78.5).epsilon(0.05));

  // Macroalgae constant everywhere water has substrate.
  for (const Cell& c : w.cells)
    if (c.habitat == HabitatClass::Lagoon) CHECK(c.macroalgae == 0.03);
}

TEST_CASE("island spec validation") {
  IslandSpec spec;
  SUBCASE("too many passes") {
    spec.n_passes = 500;
    CHECK_THROWS_AS(generate_synthetic_island(spec, 1), ValidationError);
  }
  SUBCASE("too many districts") {
    spec.n_districts = 100000;
    CHECK_THROWS_AS(generate_synthetic_island(spec, 1), ValidationError);
  }
  SUBCASE("grid too small for the ring") {
    spec.n_rows = spec.n_cols = 20;
    spec.lagoon_width_max = 12;
    CHECK_THROWS_AS(generate_synthetic_island(spec, 1), ValidationError);
  }
  SUBCASE("no passes") {
    spec.n_passes = 0;
    CHECK_THROWS_AS(generate_synthetic_island(spec, 1), ValidationError);
  }
}
