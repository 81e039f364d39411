#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "reefsim/scenario.hpp"

using namespace reefsim;

namespace {

std::vector<Fisher> small_roster() {
  std::vector<Fisher> fishers;
  for (int i = 0; i < 10; ++i) {
    Fisher f;
    f.id = i;
    f.base_radius_m = f.radius_m = (i % 3 == 0) ? 3000.0 : 10000.0;
    f.base_period = f.period = (i % 2 == 0) ? TickKind::Night : TickKind::Day;
    f.trip_probability = 0.4;
    f.trip_duration_h = 4.0;
    fishers.push_back(f);
  }
  return fishers;
}

}  // namespace

TEST_CASE("presets carry the management-plan values") {
  CHECK(scenario_preset(ScenarioName::Quota).quota_kg_per_day == 5.0);
  CHECK(scenario_preset(ScenarioName::NoPoaching).poaching_override == 0.0);
  CHECK(scenario_preset(ScenarioName::FinancialAid).radius_multiplier == 1.5);
  CHECK(scenario_preset(ScenarioName::NightBan).night_ban);
  CHECK(scenario_preset(ScenarioName::NoFishing).fisher_count_multiplier == 0.0);
  const ScenarioConfig sq = scenario_preset(ScenarioName::StatuQuo);
  CHECK_FALSE(sq.quota_kg_per_day.has_value());
  CHECK_FALSE(sq.poaching_override.has_value());
  CHECK(sq.radius_multiplier == 1.0);
  CHECK_FALSE(sq.night_ban);
}

TEST_CASE("scenario names round trip") {
  for (ScenarioName name :
       {ScenarioName::StatuQuo, ScenarioName::NoFishing, ScenarioName::NoPoaching,
        ScenarioName::Quota, ScenarioName::NightBan, ScenarioName::FinancialAid,
        ScenarioName::Custom})
    CHECK(scenario_name_from_string(to_string(name)) == name);
  CHECK_THROWS_WITH_AS(scenario_name_from_string("bogus"),
                       doctest::Contains("unknown scenario"), ValidationError);
}

TEST_CASE("apply_scenario adjusts the roster") {
  const std::vector<Fisher> roster = small_roster();

  SUBCASE("statu quo changes nothing") {
    const auto out = apply_scenario(scenario_preset(ScenarioName::StatuQuo), roster);
    CHECK(out == roster);
  }
  SUBCASE("financial aid scales a 3 km fisher to 4.5 km") {
    const auto out =
        apply_scenario(scenario_preset(ScenarioName::FinancialAid), roster);
    for (const Fisher& f : out)
      CHECK(f.radius_m == doctest::Approx(f.base_radius_m * 1.5).epsilon(1e-12));
    CHECK(out[0].radius_m == 4500.0);
  }
  SUBCASE("night ban leaves no night fishers") {
    const auto out = apply_scenario(scenario_preset(ScenarioName::NightBan), roster);
    for (const Fisher& f : out) CHECK(f.period == TickKind::Day);
    // Base periods survive untouched for replay.
    bool any_night_base = false;
    for (const Fisher& f : out)
      if (f.base_period == TickKind::Night) any_night_base = true;
    CHECK(any_night_base);
  }
  SUBCASE("no fishing empties the roster") {
    CHECK(apply_scenario(scenario_preset(ScenarioName::NoFishing), roster).empty());
  }
  SUBCASE("fractional count multipliers keep the lowest ids") {
    ScenarioConfig half;
    half.name = ScenarioName::Custom;
    half.fisher_count_multiplier = 0.5;
    const auto out = apply_scenario(half, roster);
    REQUIRE(out.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(out[static_cast<std::size_t>(i)].id == i);
  }
  SUBCASE("application is idempotent") {
    for (ScenarioName name :
         {ScenarioName::FinancialAid, ScenarioName::NightBan, ScenarioName::Quota}) {
      const ScenarioConfig config = scenario_preset(name);
      const auto once = apply_scenario(config, roster);
      const auto twice = apply_scenario(config, once);
      CHECK(once == twice);
    }
  }
  SUBCASE("invalid overrides are rejected") {
    ScenarioConfig bad = scenario_preset(ScenarioName::Quota);
    bad.quota_kg_per_day = -1.0;
    CHECK_THROWS_AS(apply_scenario(bad, roster), ValidationError);
    bad = scenario_preset(ScenarioName::StatuQuo);
    bad.radius_multiplier = -0.5;
    CHECK_THROWS_AS(apply_scenario(bad, roster), ValidationError);
  }
}

TEST_CASE("custom scenario files") {
  const auto file = std::filesystem::temp_directory_path() / "reefsim_scenario.txt";
  {
    std::ofstream out(file);
    out << "# combined management experiment\n"
           "quota_kg_per_day = 4\n"
           "poaching_probability = 0.05\n"
           "radius_multiplier = 1.2\n"
           "night_ban = true\n"
           "disturbance = on\n"
           "disturbance_start_days = 365\n";
  }
  const ScenarioConfig c = load_scenario_file(file);
  CHECK(c.name == ScenarioName::Custom);
  CHECK(c.quota_kg_per_day == 4.0);
  CHECK(c.poaching_override == 0.05);
  CHECK(c.radius_multiplier == 1.2);
  CHECK(c.night_ban);
  CHECK(c.disturbance.enabled);
  CHECK(c.disturbance.start_day == 365);

  {
    std::ofstream out(file);
    out << "quota_kg = 4\n";
  }
  CHECK_THROWS_WITH_AS(load_scenario_file(file), doctest::Contains("unknown key"),
                       ValidationError);
}
