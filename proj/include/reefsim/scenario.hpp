#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reefsim/agents.hpp"
#include "reefsim/ecology.hpp"

namespace reefsim {

enum class ScenarioName {
  StatuQuo,
  NoFishing,
  NoPoaching,
  Quota,
  NightBan,
  FinancialAid,
  Custom,
};

// A management scenario is a bundle of parameter overrides applied once at
// simulation start. Overrides compose, so Custom may combine any subset.
struct ScenarioConfig {
  ScenarioName name = ScenarioName::StatuQuo;
  std::optional<double> quota_kg_per_day;   // Quota preset: 5 kg
  std::optional<double> poaching_override;  // NoPoaching preset: 0
  double radius_multiplier = 1.0;           // FinancialAid preset: 1.5
  bool night_ban = false;
  double fisher_count_multiplier = 1.0;  // NoFishing preset: 0
  DisturbanceSchedule disturbance;

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig scenario_preset(ScenarioName name);

// Accepts the CLI spellings: statu-quo, no-fishing, no-poaching, quota,
// night-ban, financial-aid, custom.
ScenarioName scenario_name_from_string(const std::string& s);
std::string to_string(ScenarioName name);

// Key/value text file for custom scenarios (quota_kg_per_day,
// poaching_probability, radius_multiplier, night_ban, fisher_count_multiplier).
ScenarioConfig load_scenario_file(const std::filesystem::path& file);

// Applies the overrides to a generated population: scales every fisher's
// radius from its base value, reassigns night fishers to day under the ban,
// and truncates the roster under a count multiplier below 1. Idempotent —
// effective fields always derive from the base fields.
std::vector<Fisher> apply_scenario(const ScenarioConfig& config,
                                   std::vector<Fisher> fishers);

}  // namespace reefsim
