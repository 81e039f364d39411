// Command-line front end: island generation, simulation runs, scenario
// comparison and calibration dumps.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "reefsim/agents.hpp"
#include "reefsim/ecology.hpp"
#include "reefsim/engine.hpp"
#include "reefsim/island.hpp"
#include "reefsim/metrics.hpp"
#include "reefsim/scenario.hpp"
#include "reefsim/world_io.hpp"

namespace fs = std::filesystem;
using namespace reefsim;

namespace {

struct GenIslandArgs {
  std::string out;
  IslandSpec spec;
  std::uint64_t seed = 7;
};

struct RunArgs {
  std::string world_dir;
  std::string out;
  std::string district_table;
  std::string population_dir;
  int fishers = 500;
  bool save_population = false;

  std::string scenario = "statu-quo";
  std::string scenario_file;
  std::optional<double> quota;
  std::optional<double> aid;  // financial-aid fraction; 0.5 -> radius * 1.5
  std::string disturbance = "off";
  int disturbance_start_days = 730;
  int disturbance_duration_days = 1825;

  std::uint64_t seed = 1;
  std::string seeds;  // "a..b" batch
  double years = 20.0;
  std::string calibration = "balanced";
  std::string calibration_scope = "global";
  std::string fishing_mortality = "discrete";
  std::string choice_rule = "roulette";
  double surveillance = kDefaultSurveillance;
  double capture_rate = kDefaultCaptureRatePerHour;
  double tourism_threshold = 0.0;
  double spillover_threshold = 0.9;
  int threads = 1;
  int log_every = 0;
  bool dump_trips = false;
  std::string commune_map;

  // compare-only
  std::string base_scenario = "statu-quo";
  std::string variant_scenario;
};

ScenarioConfig resolve_scenario(const RunArgs& args, const std::string& name) {
  ScenarioConfig config;
  if (!args.scenario_file.empty() && name == "custom")
    config = load_scenario_file(args.scenario_file);
  else
    config = scenario_preset(scenario_name_from_string(name));
  if (args.quota) config.quota_kg_per_day = *args.quota;
  if (args.aid) config.radius_multiplier = 1.0 + *args.aid;
  config.disturbance.enabled = args.disturbance == "on";
  config.disturbance.start_day = args.disturbance_start_days;
  config.disturbance.duration_days = args.disturbance_duration_days;
  config.validate();
  return config;
}

SimConfig resolve_sim_config(const RunArgs& args) {
  SimConfig config;
  config.horizon_ticks = Clock::ticks_for_years(args.years);
  config.surveillance = args.surveillance;
  config.capture_rate_day_per_hour = args.capture_rate;
  config.tourism_conflict_threshold = args.tourism_threshold;
  config.spillover_threshold = args.spillover_threshold;
  config.fishing_mortality_mode = fishing_mode_from_string(args.fishing_mortality);
  config.choice_rule = choice_rule_from_string(args.choice_rule);
  config.ecology_threads = args.threads;
  config.log_every_ticks = args.log_every;
  config.validate();
  return config;
}

CalibrationMode resolve_calibration(const RunArgs& args) {
  CalibrationMode mode;
  if (args.calibration == "balanced")
    mode.method = CalibrationMethod::BalancedPartition;
  else if (args.calibration == "literal")
    mode.method = CalibrationMethod::PaperLiteral;
  else
    throw ValidationError("unknown calibration '" + args.calibration +
                          "' (expected balanced or literal)");
  if (args.calibration_scope == "global")
    mode.scope = CalibrationScope::GlobalMean;
  else if (args.calibration_scope == "per-cell")
    mode.scope = CalibrationScope::PerCell;
  else
    throw ValidationError("unknown calibration scope '" + args.calibration_scope +
                          "' (expected global or per-cell)");
  return mode;
}

Population resolve_population(const RunArgs& args, const WorldGrid& world) {
  if (!args.population_dir.empty()) return load_population(world, args.population_dir);
  std::vector<DistrictRow> table;
  if (!args.district_table.empty())
    table = load_district_table(args.district_table);
  else
    table = make_default_district_table(world, args.fishers, args.seed);
  return generate_population(world, table, args.seed);
}

std::vector<std::uint64_t> resolve_seeds(const RunArgs& args) {
  if (args.seeds.empty()) return {args.seed};
  const auto dots = args.seeds.find("..");
  if (dots == std::string::npos)
    throw ValidationError("--seeds expects the form a..b");
  const std::uint64_t lo = std::stoull(args.seeds.substr(0, dots));
  const std::uint64_t hi = std::stoull(args.seeds.substr(dots + 2));
  if (hi < lo) throw ValidationError("--seeds range is empty");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

void export_one_run(const RunArgs& args, const RunResult& result,
                    const Population& pop, const fs::path& out_dir) {
  Indicators ind = indicators(result);
  std::vector<DistrictIndicator> districts = district_indicators(result, pop);
  if (!args.commune_map.empty())
    districts = aggregate_by_commune(districts, load_commune_map(args.commune_map));
  export_run(result, ind, districts, out_dir);
  if (args.dump_trips) write_trip_log(result, out_dir / "trips.csv");
}

int cmd_gen_island(const GenIslandArgs& args) {
  const WorldGrid world = generate_synthetic_island(args.spec, args.seed);
  save_world(world, args.out);
  std::cerr << "island written to " << args.out << " (" << world.count_fishable()
            << " fishable cells, " << world.count_mpa() << " MPA cells)\n";
  return 0;
}

int cmd_simulate(const RunArgs& args) {
  const WorldGrid world = load_world(args.world_dir);
  const Population pop = resolve_population(args, world);
  const ScenarioConfig scenario = resolve_scenario(args, args.scenario);
  const SimConfig config = resolve_sim_config(args);

  const double mean_fishers =
      static_cast<double>(pop.fishers.size()) / world.count_fishable();
  const CalibratedParams params =
      calibrate(world, GrowthRates{}, resolve_calibration(args), mean_fishers);

  const std::vector<std::uint64_t> seeds = resolve_seeds(args);
  const bool batch = seeds.size() > 1;

  struct Row {
    std::uint64_t seed;
    GlobalIndicators g;
  };
  std::vector<Row> rows;
  for (std::uint64_t seed : seeds) {
    const fs::path out_dir =
        batch ? fs::path(args.out) / ("seed_" + std::to_string(seed))
              : fs::path(args.out);
    RunResult result = run(world, pop.fishers, scenario, params, config, seed);
    export_one_run(args, result, pop, out_dir);
    if (args.save_population) save_population(pop, world, out_dir);
    rows.push_back({seed, indicators(result).global});
  }

  if (batch) {
    std::ofstream out(fs::path(args.out) / "aggregate.csv");
    if (!out) throw ValidationError("cannot write aggregate.csv");
    out << "indicator,mean,min,max\n";
    auto emit = [&](const char* name, auto getter) {
      double sum = 0, lo = 0, hi = 0;
      int n = 0;
      for (const Row& r : rows) {
        const auto v = getter(r.g);
        if (!v) continue;
        if (n == 0) lo = hi = *v;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
        sum += *v;
        ++n;
      }
      if (n == 0)
        out << name << ",na,na,na\n";
      else
        out << name << ',' << format_exact(sum / n) << ',' << format_exact(lo)
            << ',' << format_exact(hi) << '\n';
    };
    emit("biomass_variation",
         [](const GlobalIndicators& g) { return g.biomass_variation; });
    emit("annual_catch_per_fisher_kg",
         [](const GlobalIndicators& g) { return g.annual_catch_per_fisher; });
    emit("annual_conflicts_per_fisher",
         [](const GlobalIndicators& g) { return g.annual_conflicts_per_fisher; });
  }
  return 0;
}

int cmd_compare(const RunArgs& args) {
  const WorldGrid world = load_world(args.world_dir);
  const Population pop = resolve_population(args, world);
  const ScenarioConfig base = resolve_scenario(args, args.base_scenario);
  const ScenarioConfig variant = resolve_scenario(args, args.variant_scenario);
  const SimConfig config = resolve_sim_config(args);

  const double mean_fishers =
      static_cast<double>(pop.fishers.size()) / world.count_fishable();
  const CalibratedParams params =
      calibrate(world, GrowthRates{}, resolve_calibration(args), mean_fishers);

  const auto [base_result, variant_result] =
      run_pair(world, pop.fishers, base, variant, params, config, args.seed);

  export_one_run(args, base_result, pop, fs::path(args.out) / "base");
  export_one_run(args, variant_result, pop, fs::path(args.out) / "variant");
  const Comparison cmp = compare(base_result, variant_result);
  export_comparison(cmp, args.out);
  if (!cmp.ratios.annual_catch)
    std::cerr << "note: catch ratio is undefined (base has no catch indicator); "
                 "ratios.csv holds 'na'\n";
  return 0;
}

int cmd_calibrate(const RunArgs& args, const std::string& out_file) {
  const WorldGrid world = load_world(args.world_dir);
  CalibrationMode mode = resolve_calibration(args);
  if (mode.scope != CalibrationScope::GlobalMean)
    throw ValidationError("calibrate dumps the global parameter set; use "
                          "--calibration-scope global");
  const Population pop = resolve_population(args, world);
  const double mean_fishers =
      static_cast<double>(pop.fishers.size()) / world.count_fishable();
  const CalibratedParams params = calibrate(world, GrowthRates{}, mode, mean_fishers);
  save_lv_params(params.global, out_file);
  std::cerr << "parameters written to " << out_file << " (mean fishers per cell "
            << mean_fishers << ")\n";
  return 0;
}

void add_population_flags(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--world", args.world_dir, "Map bundle directory")->required();
  cmd->add_option("--district-table", args.district_table,
                  "District table CSV (district,households,pro,annex,boats,"
                  "pirogues,dependence)");
  cmd->add_option("--population-dir", args.population_dir,
                  "Directory with households.csv/fishers.csv for exact replay");
  cmd->add_option("--fishers", args.fishers,
                  "Total fishers for the default district table")->capture_default_str();
  cmd->add_option("--seed", args.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--years", args.years, "Simulated years")->capture_default_str();
  cmd->add_option("--calibration", args.calibration, "balanced|literal")->capture_default_str();
  cmd->add_option("--calibration-scope", args.calibration_scope,
                  "global|per-cell")->capture_default_str();
  cmd->add_option("--fishing-mortality", args.fishing_mortality,
                  "discrete|lv|both")->capture_default_str();
  cmd->add_option("--choice-rule", args.choice_rule, "roulette|argmax")->capture_default_str();
  cmd->add_option("--surveillance", args.surveillance,
                  "Surveillance level in the poaching formula")->capture_default_str();
  cmd->add_option("--capture-rate", args.capture_rate,
                  "Day capture rate per hour of fishing")->capture_default_str();
  cmd->add_option("--tourism-threshold", args.tourism_threshold,
                  "Tourism level above which a day conflict fires")->capture_default_str();
  cmd->add_option("--spillover-threshold", args.spillover_threshold,
                  "Carrying-capacity fraction that triggers spillover")->capture_default_str();
  cmd->add_option("--threads", args.threads, "Ecology worker threads")->capture_default_str();
  cmd->add_option("--log-every", args.log_every,
                  "Progress line cadence in ticks (0 = quiet)")->capture_default_str();
  cmd->add_option("--disturbance", args.disturbance, "on|off")->capture_default_str();
  cmd->add_option("--disturbance-start-days", args.disturbance_start_days,
                  "Disturbance onset, days")->capture_default_str();
  cmd->add_option("--disturbance-duration-days", args.disturbance_duration_days,
                  "Disturbance length, days")->capture_default_str();
  cmd->add_option("--commune-map", args.commune_map,
                  "district,commune CSV for aggregated outputs");
  cmd->set_config("--config", "", "Key/value config file; explicit flags win");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reefsim: lagoon fishery scenario simulator"};
  app.require_subcommand(1);

  GenIslandArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-island", "Write a synthetic map bundle");
  gen->add_option("--out", gen_args.out, "Output bundle directory")->required();
  gen->add_option("--size", gen_args.spec.n_rows, "Grid rows and columns")->capture_default_str()
      ->check(CLI::Range(16, 4096));
  gen->add_option("--passes", gen_args.spec.n_passes, "Passes through the crest")->capture_default_str();
  gen->add_option("--mpas", gen_args.spec.n_mpas, "Protected sectors")->capture_default_str();
  gen->add_option("--districts", gen_args.spec.n_districts, "Coastline districts")->capture_default_str();
  gen->add_option("--seed", gen_args.seed, "Generator seed")->capture_default_str();
  gen->add_option("--mpa-fraction", gen_args.spec.mpa_lagoon_fraction,
                  "Lagoon share inside MPAs")->capture_default_str();
  gen->add_option("--lagoon-width-min", gen_args.spec.lagoon_width_min,
                  "Narrowest lagoon width, cells")->capture_default_str();
  gen->add_option("--lagoon-width-max", gen_args.spec.lagoon_width_max,
                  "Widest lagoon width, cells")->capture_default_str();
  gen->add_option("--tourism-mean", gen_args.spec.tourism_mean,
                  "Mean daily tourist passages on fishable cells")->capture_default_str();

  RunArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Run one scenario");
  add_population_flags(sim, sim_args);
  sim->add_option("--out", sim_args.out, "Output directory")->required();
  sim->add_option("--scenario", sim_args.scenario,
                  "statu-quo|no-fishing|no-poaching|quota|night-ban|"
                  "financial-aid|custom")->capture_default_str();
  sim->add_option("--scenario-file", sim_args.scenario_file,
                  "Key/value file for --scenario custom");
  sim->add_option("--quota", sim_args.quota, "Per-trip quota, kg");
  sim->add_option("--aid", sim_args.aid,
                  "Financial-aid fraction (0.5 means radius x 1.5)");
  sim->add_option("--seeds", sim_args.seeds, "Seed batch a..b");
  sim->add_flag("--dump-trips", sim_args.dump_trips, "Also write trips.csv");
  sim->add_flag("--save-population", sim_args.save_population,
                "Also write households.csv/fishers.csv");

  RunArgs cmp_args;
  CLI::App* cmp = app.add_subcommand("compare", "Run base and variant, write ratios");
  add_population_flags(cmp, cmp_args);
  cmp->add_option("--out", cmp_args.out, "Output directory")->required();
  cmp->add_option("--base", cmp_args.base_scenario, "Baseline scenario")->capture_default_str();
  cmp->add_option("--variant", cmp_args.variant_scenario, "Variant scenario")
      ->required();
  cmp->add_option("--scenario-file", cmp_args.scenario_file,
                  "Key/value file when either side is custom");
  cmp->add_option("--quota", cmp_args.quota, "Per-trip quota, kg");
  cmp->add_option("--aid", cmp_args.aid,
                  "Financial-aid fraction (0.5 means radius x 1.5)");
  cmp->add_flag("--dump-trips", cmp_args.dump_trips, "Also write trips.csv");

  RunArgs cal_args;
  std::string cal_out;
  CLI::App* cal = app.add_subcommand("calibrate",
                                     "Dump the calibrated parameter set");
  add_population_flags(cal, cal_args);
  cal->add_option("--out", cal_out, "Output parameter file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      gen_args.spec.n_cols = gen_args.spec.n_rows;
      return cmd_gen_island(gen_args);
    }
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (cmp->parsed()) return cmd_compare(cmp_args);
    if (cal->parsed()) return cmd_calibrate(cal_args, cal_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
