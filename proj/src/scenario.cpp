#include "reefsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace reefsim {

void ScenarioConfig::validate() const {
  if (quota_kg_per_day && *quota_kg_per_day < 0.0)
    throw ValidationError("scenario: negative quota");
  if (poaching_override &&
      (*poaching_override < 0.0 || *poaching_override > 1.0))
    throw ValidationError("scenario: poaching override outside [0,1]");
  if (radius_multiplier < 0.0)
    throw ValidationError("scenario: negative radius multiplier");
  if (fisher_count_multiplier < 0.0)
    throw ValidationError("scenario: negative fisher count multiplier");
  disturbance.validate();
}

ScenarioConfig scenario_preset(ScenarioName name) {
  ScenarioConfig c;
  c.name = name;
  switch (name) {
    case ScenarioName::StatuQuo:
    case ScenarioName::Custom:
      break;
    case ScenarioName::NoFishing:
      c.fisher_count_multiplier = 0.0;
      break;
    case ScenarioName::NoPoaching:
      c.poaching_override = 0.0;
      break;
    case ScenarioName::Quota:
      c.quota_kg_per_day = 5.0;
      break;
    case ScenarioName::NightBan:
      c.night_ban = true;
      break;
    case ScenarioName::FinancialAid:
      c.radius_multiplier = 1.5;
      break;
  }
  return c;
}

ScenarioName scenario_name_from_string(const std::string& s) {
  if (s == "statu-quo" || s == "statuquo") return ScenarioName::StatuQuo;
  if (s == "no-fishing") return ScenarioName::NoFishing;
  if (s == "no-poaching") return ScenarioName::NoPoaching;
  if (s == "quota") return ScenarioName::Quota;
  if (s == "night-ban") return ScenarioName::NightBan;
  if (s == "financial-aid") return ScenarioName::FinancialAid;
  if (s == "custom") return ScenarioName::Custom;
  throw ValidationError("unknown scenario '" + s +
                        "' (expected statu-quo, no-fishing, no-poaching, quota, "
                        "night-ban, financial-aid or custom)");
}

std::string to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::StatuQuo: return "statu-quo";
    case ScenarioName::NoFishing: return "no-fishing";
    case ScenarioName::NoPoaching: return "no-poaching";
    case ScenarioName::Quota: return "quota";
    case ScenarioName::NightBan: return "night-ban";
    case ScenarioName::FinancialAid: return "financial-aid";
    case ScenarioName::Custom: return "custom";
  }
  return "?";
}

ScenarioConfig load_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open scenario file: " + file.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ScenarioConfig c;
  c.name = ScenarioName::Custom;
  auto number = [&](const std::string& key) {
    try {
      return std::stod(kv.at(key));
    } catch (const std::exception&) {
      throw ValidationError("scenario file: bad value for '" + key + "'");
    }
  };
  for (const auto& [key, value] : kv) {
    if (key == "quota_kg_per_day") c.quota_kg_per_day = number(key);
    else if (key == "poaching_probability") c.poaching_override = number(key);
    else if (key == "radius_multiplier") c.radius_multiplier = number(key);
    else if (key == "fisher_count_multiplier") c.fisher_count_multiplier = number(key);
    else if (key == "night_ban") c.night_ban = value == "true" || value == "1";
    else if (key == "disturbance") c.disturbance.enabled = value == "on" || value == "1";
    else if (key == "disturbance_start_days") c.disturbance.start_day = static_cast<int>(number(key));
    else if (key == "disturbance_duration_days") c.disturbance.duration_days = static_cast<int>(number(key));
    else throw ValidationError("scenario file: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

std::vector<Fisher> apply_scenario(const ScenarioConfig& config,
                                   std::vector<Fisher> fishers) {
  config.validate();

  if (config.fisher_count_multiplier < 1.0) {
    const auto keep = static_cast<std::size_t>(
        std::lround(static_cast<double>(fishers.size()) *
                    config.fisher_count_multiplier));
    std::sort(fishers.begin(), fishers.end(),
              [](const Fisher& a, const Fisher& b) { return a.id < b.id; });
    fishers.resize(std::min(keep, fishers.size()));
  }
  for (Fisher& f : fishers) {
    f.radius_m = f.base_radius_m * config.radius_multiplier;
    f.period = (config.night_ban && f.base_period == TickKind::Night)
                   ? TickKind::Day
                   : f.base_period;
  }
  return fishers;
}

}  // namespace reefsim
