#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "reefsim/rng.hpp"
#include "reefsim/world.hpp"
#include "reefsim/world_io.hpp"

using namespace reefsim;
namespace fs = std::filesystem;

namespace {

WorldGrid blank_world(int rows, int cols, HabitatClass fill = HabitatClass::Lagoon) {
  WorldGrid w;
  w.n_rows = rows;
  w.n_cols = cols;
  w.cells.assign(static_cast<std::size_t>(rows * cols), Cell{});
  for (Cell& c : w.cells) c.habitat = fill;
  return w;
}

void fill_uniform(WorldGrid& w, double coral = 0.26, double turf = 0.20,
                  double herb = 305, double coro = 25.3, double carn = 78.5) {
  for (Cell& c : w.cells) {
    if (c.habitat == HabitatClass::Land) continue;
    c.coral = coral;
    c.turf = turf;
    c.macroalgae = 0.03;
    if (fishable(c.habitat)) {
      c.fish = {herb, coro, carn};
      c.preference = 1.0;
      c.tourism = 0.5;
    }
  }
}

// Independent oracle: Bellman-Ford style relaxation until stable. Slower and
// structurally different from the Dijkstra under test.
std::vector<double> brute_force_distances(const WorldGrid& w, int origin) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(w.size()), inf);
  dist[static_cast<std::size_t>(origin)] = 0.0;
  const double diag = w.cell_size_m * std::sqrt(2.0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < w.size(); ++i) {
      if (std::isinf(dist[static_cast<std::size_t>(i)])) continue;
      const int r = w.row_of(i), c = w.col_of(i);
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr == 0 && dc == 0) || !w.in_bounds(r + dr, c + dc)) continue;
          const int j = w.index(r + dr, c + dc);
          if (!navigable(w.at(j).habitat)) continue;
          const double nd = dist[static_cast<std::size_t>(i)] +
                            ((dr && dc) ? diag : w.cell_size_m);
          if (nd < dist[static_cast<std::size_t>(j)] - 1e-12) {
            dist[static_cast<std::size_t>(j)] = nd;
            changed = true;
          }
        }
    }
  }
  return dist;
}

}  // namespace

TEST_CASE("grid indexing and neighborhoods") {
  WorldGrid w = blank_world(3, 4);
  CHECK(w.index(1, 2) == 6);
  CHECK(w.row_of(6) == 1);
  CHECK(w.col_of(6) == 2);
  std::array<int, 8> nbr{};
  CHECK(w.neighbors8(w.index(0, 0), nbr) == 3);
  CHECK(w.neighbors8(w.index(0, 1), nbr) == 5);
  CHECK(w.neighbors8(w.index(1, 1), nbr) == 8);
}

TEST_CASE("finalize computes caps and validates invariants") {
  WorldGrid w = blank_world(2, 2);
  fill_uniform(w);
  w.finalize_initial_state();
  CHECK(w.at(0).substrate_cap == doctest::Approx(0.46).epsilon(1e-12));
  CHECK(w.at(0).carrying[kHerbivore] == doctest::Approx(610.0).epsilon(1e-12));
  CHECK(w.at(0).carrying[kCorallivore] == doctest::Approx(50.6).epsilon(1e-12));

  SUBCASE("no fishable cells") {
    WorldGrid land = blank_world(1, 1, HabitatClass::Land);
    CHECK_THROWS_WITH_AS(land.finalize_initial_state(),
                         doctest::Contains("no fishable cells"), ValidationError);
  }
  SUBCASE("land with biomass") {
    WorldGrid bad = blank_world(2, 2);
    bad.at(0).habitat = HabitatClass::Land;
    fill_uniform(bad);
    bad.at(0).fish[kHerbivore] = 1.0;
    CHECK_THROWS_AS(bad.finalize_initial_state(), ValidationError);
  }
  SUBCASE("coral plus turf above one") {
    WorldGrid bad = blank_world(2, 2);
    fill_uniform(bad);
    bad.at(0).coral = 0.7;
    bad.at(0).turf = 0.4;
    CHECK_THROWS_AS(bad.finalize_initial_state(), ValidationError);
  }
  SUBCASE("negative biomass") {
    WorldGrid bad = blank_world(2, 2);
    fill_uniform(bad);
    bad.at(1).fish[kCarnivore] = -1.0;
    CHECK_THROWS_AS(bad.finalize_initial_state(), ValidationError);
  }
}

TEST_CASE("distance field basics") {
  WorldGrid w = blank_world(5, 5);
  const int origin = w.index(2, 2);
  DistanceField f = distance_field(w, origin);
  CHECK(f.dist_m[static_cast<std::size_t>(origin)] == 0.0);
  CHECK(f.dist_m[static_cast<std::size_t>(w.index(2, 3))] == doctest::Approx(100.0));
  CHECK(f.dist_m[static_cast<std::size_t>(w.index(3, 3))] ==
        doctest::Approx(100.0 * std::sqrt(2.0)));

  w.at(0, 0).habitat = HabitatClass::Land;
  CHECK_THROWS_AS(distance_field(w, w.index(0, 0)), ValidationError);
}

TEST_CASE("reef crest blocks, passes connect") {
  // Lagoon corridor split by a crest wall; the only pass sits at the bottom.
  WorldGrid w = blank_world(6, 21);
  for (int r = 0; r < 5; ++r) w.at(r, 10).habitat = HabitatClass::ReefCrest;
  w.at(5, 10).habitat = HabitatClass::Pass;

  const int a = w.index(0, 9), b = w.index(0, 11);
  DistanceField f = distance_field(w, a);
  const auto oracle = brute_force_distances(w, a);
  for (int i = 0; i < w.size(); ++i) {
    if (std::isinf(oracle[static_cast<std::size_t>(i)]))
      CHECK(std::isinf(f.dist_m[static_cast<std::size_t>(i)]));
    else
      CHECK(f.dist_m[static_cast<std::size_t>(i)] ==
            doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }
  // The detour through the pass is far longer than the 200 m crow-flight.
  CHECK(f.dist_m[static_cast<std::size_t>(b)] > 1000.0);

  SUBCASE("enclosed water is unreachable") {
    WorldGrid pond = blank_world(5, 5, HabitatClass::Land);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c)
        if (r == 0 || c == 0 || r == 4 || c == 4)
          pond.at(r, c).habitat = HabitatClass::Lagoon;
    pond.at(2, 2).habitat = HabitatClass::Lagoon;  // inner pond
    DistanceField g = distance_field(pond, pond.index(0, 0));
    CHECK(std::isinf(g.dist_m[static_cast<std::size_t>(pond.index(2, 2))]));
  }
}

TEST_CASE("distance field matches the brute-force oracle on a random map") {
  Rng rng(99);
  WorldGrid w = blank_world(12, 12);
  for (Cell& c : w.cells) {
    const double u = rng.uniform01();
    c.habitat = u < 0.25   ? HabitatClass::Land
                : u < 0.35 ? HabitatClass::ReefCrest
                           : HabitatClass::Lagoon;
  }
  w.at(0).habitat = HabitatClass::Lagoon;
  DistanceField f = distance_field(w, 0);
  const auto oracle = brute_force_distances(w, 0);
  for (int i = 0; i < w.size(); ++i) {
    if (std::isinf(oracle[static_cast<std::size_t>(i)])) {
      CHECK(std::isinf(f.dist_m[static_cast<std::size_t>(i)]));
    } else {
      CHECK(f.dist_m[static_cast<std::size_t>(i)] ==
            doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
  }

  // Path symmetry on a few navigable pairs.
  std::vector<int> navigable_cells;
  for (int i = 0; i < w.size(); ++i)
    if (navigable(w.at(i).habitat)) navigable_cells.push_back(i);
  for (int k = 0; k < 5; ++k) {
    const int a = navigable_cells[static_cast<std::size_t>(
        rng.uniform_below(navigable_cells.size()))];
    const int b = navigable_cells[static_cast<std::size_t>(
        rng.uniform_below(navigable_cells.size()))];
    const double ab = distance_field(w, a).dist_m[static_cast<std::size_t>(b)];
    const double ba = distance_field(w, b).dist_m[static_cast<std::size_t>(a)];
    if (std::isinf(ab))
      CHECK(std::isinf(ba));
    else
      CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
  }
}

TEST_CASE("reachable fishable cells") {
  WorldGrid w = blank_world(9, 9);
  const int origin = w.index(4, 4);

  SUBCASE("radius below one cell returns only the origin") {
    const auto set = reachable_fishable_cells(w, origin, 50.0);
    REQUIRE(set.size() == 1);
    CHECK(set[0] == origin);
  }
  SUBCASE("monotone in radius, saturates at the connected component") {
    std::size_t prev = 0;
    for (double radius : {100.0, 250.0, 400.0, 800.0, 10000.0}) {
      const auto set = reachable_fishable_cells(w, origin, radius);
      CHECK(set.size() >= prev);
      prev = set.size();
    }
    CHECK(prev == static_cast<std::size_t>(w.size()));  // everything fishable
  }
  SUBCASE("zero radius rejected") {
    CHECK_THROWS_AS(reachable_fishable_cells(w, origin, 0.0), ValidationError);
  }
}

TEST_CASE("bundle save/load round trip") {
  WorldGrid w = blank_world(4, 5);
  w.at(0, 0).habitat = HabitatClass::Land;
  w.at(2, 2).habitat = HabitatClass::OuterSlope;
  w.at(3, 4).habitat = HabitatClass::OpenOcean;
  fill_uniform(w);
  w.at(1, 1).mpa = true;
  for (Cell& c : w.cells)
    c.district = c.habitat == HabitatClass::OpenOcean ? kNoDistrict : 1;
  w.finalize_initial_state();

  const fs::path dir = fs::temp_directory_path() / "reefsim_bundle_test";
  fs::remove_all(dir);
  save_world(w, dir);
  WorldGrid loaded = load_world(dir);
  CHECK(loaded.n_rows == w.n_rows);
  CHECK(loaded.n_cols == w.n_cols);
  REQUIRE(loaded.cells.size() == w.cells.size());
  for (std::size_t i = 0; i < w.cells.size(); ++i) {
    CHECK(loaded.cells[i].habitat == w.cells[i].habitat);
    CHECK(loaded.cells[i].coral == w.cells[i].coral);
    CHECK(loaded.cells[i].fish == w.cells[i].fish);
    CHECK(loaded.cells[i].carrying == w.cells[i].carrying);
  }

  // Text round trip: saving the loaded world reproduces the files exactly.
  const fs::path dir2 = fs::temp_directory_path() / "reefsim_bundle_test2";
  fs::remove_all(dir2);
  save_world(loaded, dir2);
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream f1(entry.path(), std::ios::binary);
    std::ifstream f2(dir2 / entry.path().filename(), std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
  }

  SUBCASE("values survive with bundle precision") {
    CHECK(loaded.at(1, 0).coral == 0.26);
    CHECK(loaded.at(1, 0).carrying[kHerbivore] == 610.0);
  }
  SUBCASE("habitat code outside enumeration") {
    std::ofstream bad(dir / "habitat.asc");
    bad << "5 4\n";
    for (int r = 0; r < 4; ++r) bad << "9 1 1 1 1\n";
    bad.close();
    CHECK_THROWS_WITH_AS(load_world(dir), doctest::Contains("outside enumeration"),
                         ValidationError);
  }
  SUBCASE("dimension mismatch between layers") {
    std::ofstream bad(dir / "coral.asc");
    bad << "2 2\n0 0\n0 0\n";
    bad.close();
    CHECK_THROWS_WITH_AS(load_world(dir), doctest::Contains("dimensions"),
                         ValidationError);
  }
  SUBCASE("missing header key") {
    std::ofstream hdr(dir / "world.toml");
    hdr << "n_rows = 4\n";
    hdr.close();
    CHECK_THROWS_AS(load_world(dir), ValidationError);
  }
}

TEST_CASE("one-by-one land bundle reports no fishable cells") {
  const fs::path dir = fs::temp_directory_path() / "reefsim_land_bundle";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream hdr(dir / "world.toml");
  hdr << "n_rows = 1\nn_cols = 1\ncell_size_m = 100\n";
  for (const char* name : {"habitat", "mpa", "district", "coral", "turf",
                           "macroalgae", "herbivores", "corallivores",
                           "carnivores", "preference", "tourism"}) {
    hdr << "layer." << name << " = " << name << ".asc\n";
    std::ofstream layer(dir / (std::string(name) + ".asc"));
    layer << "1 1\n0\n";
  }
  hdr.close();
  CHECK_THROWS_WITH_AS(load_world(dir), doctest::Contains("no fishable cells"),
                       ValidationError);
}

TEST_CASE("distance cache returns shared fields") {
  WorldGrid w = blank_world(4, 4);
  DistanceFieldCache cache;
  const DistanceField& f1 = cache.get(w, 0);
  const DistanceField& f2 = cache.get(w, 0);
  CHECK(&f1 == &f2);
  CHECK(cache.size() == 1);
  cache.get(w, 1);
  CHECK(cache.size() == 2);
}
