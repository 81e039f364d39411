#include "reefsim/agents.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace reefsim {

namespace fs = std::filesystem;

std::vector<int> coastal_land_cells(const WorldGrid& world, int district) {
  std::vector<int> out;
  std::array<int, 8> nbr{};
  for (int i = 0; i < world.size(); ++i) {
    const Cell& cell = world.at(i);
    if (cell.habitat != HabitatClass::Land || cell.district != district) continue;
    const int n = world.neighbors8(i, nbr);
    for (int k = 0; k < n; ++k)
      if (navigable(world.at(nbr[static_cast<std::size_t>(k)]).habitat)) {
        out.push_back(i);
        break;
      }
  }
  return out;
}

int nearest_fishable_cell(const WorldGrid& world, int land_cell) {
  const int r0 = world.row_of(land_cell), c0 = world.col_of(land_cell);
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < world.size(); ++i) {
    if (!fishable(world.at(i).habitat)) continue;
    const double dr = world.row_of(i) - r0, dc = world.col_of(i) - c0;
    const double d2 = dr * dr + dc * dc;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

namespace {

double radius_for(const Household& hh) {
  if (hh.has_boat) return 10000.0;
  if (hh.has_pirogue) return 3000.0;
  return 1000.0;
}

// Sample k distinct indices out of n (partial Fisher-Yates), ascending ids
// not required; draw order is what matters for reproducibility.
std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) +
                          static_cast<std::size_t>(rng.uniform_below(
                              static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    out.push_back(pool[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

Population generate_population(const WorldGrid& world,
                               const std::vector<DistrictRow>& table,
                               std::uint64_t seed) {
  std::vector<DistrictRow> rows = table;
  std::sort(rows.begin(), rows.end(),
            [](const DistrictRow& a, const DistrictRow& b) {
              return a.district < b.district;
            });

  Rng rng(seed);
  Population pop;
  for (const DistrictRow& row : rows) {
    if (row.households < 0 || row.pro < 0 || row.annex < 0 || row.boats < 0 ||
        row.pirogues < 0)
      throw ValidationError("district " + std::to_string(row.district) +
                            ": negative count");
    if (row.dependence < 0.0 || row.dependence > 1.0)
      throw ValidationError("district " + std::to_string(row.district) +
                            ": dependence outside [0,1]");
    if (row.households == 0) {
      if (row.pro + row.annex > 0)
        throw ValidationError("district " + std::to_string(row.district) +
                              ": fishers but no households");
      continue;
    }
    if (row.boats > row.households || row.pirogues > row.households)
      throw ValidationError("district " + std::to_string(row.district) +
                            ": more craft than households");

    const std::vector<int> coast = coastal_land_cells(world, row.district);
    if (coast.empty())
      throw ValidationError("district " + std::to_string(row.district) +
                            " has no coastal land cell");

    const int first_hh = static_cast<int>(pop.households.size());
    for (int h = 0; h < row.households; ++h) {
      Household hh;
      hh.id = static_cast<int>(pop.households.size());
      hh.district = row.district;
      hh.location = coast[static_cast<std::size_t>(
          rng.uniform_below(coast.size()))];
      pop.households.push_back(hh);
    }
    for (int idx : sample_without_replacement(row.households, row.boats, rng))
      pop.households[static_cast<std::size_t>(first_hh + idx)].has_boat = true;
    for (int idx : sample_without_replacement(row.households, row.pirogues, rng))
      pop.households[static_cast<std::size_t>(first_hh + idx)].has_pirogue = true;

    const int n_fishers = row.pro + row.annex;
    for (int f = 0; f < n_fishers; ++f) {
      const bool pro = f < row.pro;
      Fisher fisher;
      fisher.id = static_cast<int>(pop.fishers.size());
      const int hh_idx =
          first_hh + static_cast<int>(rng.uniform_below(
                         static_cast<std::uint64_t>(row.households)));
      Household& hh = pop.households[static_cast<std::size_t>(hh_idx)];
      fisher.household = hh.id;
      fisher.kind = pro ? FisherKind::Pro : FisherKind::Annex;
      (pro ? hh.n_pro : hh.n_annex) += 1;
      fisher.trip_probability = pro ? rng.uniform(2.0 / 7.0, 5.0 / 7.0)
                                    : rng.uniform(1.0 / 7.0, 3.0 / 7.0);
      fisher.trip_duration_h = pro ? 8.0 : 4.0;
      fisher.selectivity = rng.uniform01();
      fisher.base_period = rng.bernoulli(0.7) ? TickKind::Night : TickKind::Day;
      fisher.resource_dependence = row.dependence;
      pop.fishers.push_back(fisher);
    }
  }

  // Non-random derived attributes.
  for (Fisher& fisher : pop.fishers) {
    const Household& hh = pop.households[static_cast<std::size_t>(fisher.household)];
    fisher.base_radius_m = radius_for(hh);
    fisher.radius_m = fisher.base_radius_m;
    fisher.period = fisher.base_period;
    fisher.departure_cell = nearest_fishable_cell(world, hh.location);
    if (fisher.departure_cell < 0)
      throw ValidationError("no fishable cell reachable from household " +
                            std::to_string(hh.id));
  }
  return pop;
}

std::vector<DistrictRow> make_default_district_table(const WorldGrid& world,
                                                     int total_fishers,
                                                     std::uint64_t seed) {
  if (total_fishers < 0) throw ValidationError("negative fisher total");

  // Districts that actually have coastline, ascending.
  std::vector<int> districts;
  std::vector<int> coast_counts;
  {
    std::vector<int> seen;
    for (int i = 0; i < world.size(); ++i) {
      const Cell& c = world.at(i);
      if (c.habitat == HabitatClass::Land && c.district >= 0)
        if (std::find(seen.begin(), seen.end(), c.district) == seen.end())
          seen.push_back(c.district);
    }
    std::sort(seen.begin(), seen.end());
    for (int d : seen) {
      const auto coast = coastal_land_cells(world, d);
      if (!coast.empty()) {
        districts.push_back(d);
        coast_counts.push_back(static_cast<int>(coast.size()));
      }
    }
  }
  if (districts.empty())
    throw ValidationError("world has no district with coastal land");

  const int n_d = static_cast<int>(districts.size());
  const double coast_total =
      std::accumulate(coast_counts.begin(), coast_counts.end(), 0.0);

  // Moorea ratios: 440 professional out of 2244.
  const int pro_total = static_cast<int>(
      std::lround(static_cast<double>(total_fishers) * 440.0 / 2244.0));

  // Largest-remainder split so the totals come out exact.
  auto split = [&](int total) {
    std::vector<int> share(static_cast<std::size_t>(n_d), 0);
    std::vector<std::pair<double, int>> rema;
    int assigned = 0;
    for (int k = 0; k < n_d; ++k) {
      const double exact = total * coast_counts[static_cast<std::size_t>(k)] /
                           coast_total;
      share[static_cast<std::size_t>(k)] = static_cast<int>(exact);
      assigned += share[static_cast<std::size_t>(k)];
      rema.emplace_back(exact - std::floor(exact), k);
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (int r = 0; r < total - assigned; ++r)
      share[static_cast<std::size_t>(rema[static_cast<std::size_t>(r)].second)] += 1;
    return share;
  };
  const std::vector<int> pro_share = split(pro_total);
  const std::vector<int> all_share = split(total_fishers);

  Rng rng(Rng::child_seed(seed, 11));
  std::vector<DistrictRow> table;
  for (int k = 0; k < n_d; ++k) {
    DistrictRow row;
    row.district = districts[static_cast<std::size_t>(k)];
    row.pro = std::min(pro_share[static_cast<std::size_t>(k)],
                       all_share[static_cast<std::size_t>(k)]);
    row.annex = all_share[static_cast<std::size_t>(k)] - row.pro;
    const int fishers = row.pro + row.annex;
    // Around 1.6 fishers per fishing household; every district with fishers
    // needs at least one.
    row.households = fishers > 0 ? std::max(1, (fishers * 5 + 4) / 8) : 0;
    // Equipment mix: ~30% of households run a boat, ~40% a pirogue.
    row.boats = static_cast<int>(std::lround(row.households * 0.30));
    row.pirogues = static_cast<int>(std::lround(row.households * 0.40));
    row.dependence = rng.uniform(0.2, 0.8);
    table.push_back(row);
  }
  return table;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::string format_exact(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<DistrictRow> load_district_table(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open district table: " + file.string());
  std::vector<DistrictRow> table;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {  // column names
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 7)
      throw ValidationError("district table: expected 7 columns, got " +
                            std::to_string(f.size()));
    DistrictRow row;
    try {
      row.district = std::stoi(f[0]);
      row.households = std::stoi(f[1]);
      row.pro = std::stoi(f[2]);
      row.annex = std::stoi(f[3]);
      row.boats = std::stoi(f[4]);
      row.pirogues = std::stoi(f[5]);
      row.dependence = std::stod(f[6]);
    } catch (const std::exception&) {
      throw ValidationError("district table: bad row '" + line + "'");
    }
    table.push_back(row);
  }
  return table;
}

void save_district_table(const std::vector<DistrictRow>& table,
                         const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write district table: " + file.string());
  out << "district,households,pro,annex,boats,pirogues,dependence\n";
  for (const DistrictRow& r : table)
    out << r.district << ',' << r.households << ',' << r.pro << ',' << r.annex
        << ',' << r.boats << ',' << r.pirogues << ','
        << format_exact(r.dependence) << '\n';
}

void save_population(const Population& pop, const WorldGrid& world,
                     const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "households.csv");
    if (!out) throw ValidationError("cannot write households.csv in " + dir.string());
    out << "id,district,row,col,n_pro,n_annex,boat,pirogue\n";
    for (const Household& h : pop.households)
      out << h.id << ',' << h.district << ',' << world.row_of(h.location) << ','
          << world.col_of(h.location) << ',' << h.n_pro << ',' << h.n_annex << ','
          << (h.has_boat ? 1 : 0) << ',' << (h.has_pirogue ? 1 : 0) << '\n';
  }
  {
    std::ofstream out(dir / "fishers.csv");
    if (!out) throw ValidationError("cannot write fishers.csv in " + dir.string());
    out << "id,household,kind,radius_m,trip_prob,duration_h,selectivity,period,"
           "dependence\n";
    for (const Fisher& f : pop.fishers)
      out << f.id << ',' << f.household << ','
          << (f.kind == FisherKind::Pro ? "pro" : "annex") << ','
          << format_exact(f.base_radius_m) << ','
          << format_exact(f.trip_probability) << ','
          << format_exact(f.trip_duration_h) << ','
          << format_exact(f.selectivity) << ','
          << (f.base_period == TickKind::Day ? "day" : "night") << ','
          << format_exact(f.resource_dependence) << '\n';
  }
}

Population load_population(const WorldGrid& world, const fs::path& dir) {
  Population pop;
  {
    std::ifstream in(dir / "households.csv");
    if (!in) throw ValidationError("cannot open households.csv in " + dir.string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 8) throw ValidationError("households.csv: bad row");
      Household h;
      h.id = std::stoi(f[0]);
      h.district = std::stoi(f[1]);
      const int row = std::stoi(f[2]), col = std::stoi(f[3]);
      if (!world.in_bounds(row, col))
        throw ValidationError("households.csv: location outside the grid");
      h.location = world.index(row, col);
      h.n_pro = std::stoi(f[4]);
      h.n_annex = std::stoi(f[5]);
      h.has_boat = std::stoi(f[6]) != 0;
      h.has_pirogue = std::stoi(f[7]) != 0;
      pop.households.push_back(h);
    }
  }
  {
    std::ifstream in(dir / "fishers.csv");
    if (!in) throw ValidationError("cannot open fishers.csv in " + dir.string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 9) throw ValidationError("fishers.csv: bad row");
      Fisher fisher;
      fisher.id = std::stoi(f[0]);
      fisher.household = std::stoi(f[1]);
      fisher.kind = f[2] == "pro" ? FisherKind::Pro : FisherKind::Annex;
      fisher.base_radius_m = std::stod(f[3]);
      fisher.trip_probability = std::stod(f[4]);
      fisher.trip_duration_h = std::stod(f[5]);
      fisher.selectivity = std::stod(f[6]);
      fisher.base_period = f[7] == "day" ? TickKind::Day : TickKind::Night;
      fisher.resource_dependence = std::stod(f[8]);
      fisher.radius_m = fisher.base_radius_m;
      fisher.period = fisher.base_period;
      if (fisher.household < 0 ||
          fisher.household >= static_cast<int>(pop.households.size()))
        throw ValidationError("fishers.csv: unknown household id");
      fisher.departure_cell = nearest_fishable_cell(
          world, pop.households[static_cast<std::size_t>(fisher.household)].location);
      pop.fishers.push_back(fisher);
    }
  }
  return pop;
}

bool decide_trip(const Fisher& fisher, TickKind kind, Rng& rng) {
  if (kind != fisher.period) return false;
  return rng.bernoulli(fisher.trip_probability);
}

double poaching_probability(const Fisher& fisher, TickKind kind,
                            double surveillance) {
  assert(surveillance >= 0.0);
  if (kind == TickKind::Night) return 1.0 / (1.0 + surveillance);
  return fisher.resource_dependence / (1.0 + surveillance);
}

double direct_criterion(double value, double max_value) {
  if (max_value <= 0.0) return 0.0;
  return std::log2(value / max_value + 1.0);
}

double inverse_criterion(double value, double max_value) {
  if (max_value <= 0.0) return 1.0;
  return 1.0 - std::log2(value / max_value + 1.0);
}

double score_cell(const Cell& cell, const Fisher& fisher, double dist_m,
                  const LayerMaxima& maxima, bool occupied, TickKind kind) {
  const double pref_c = direct_criterion(cell.preference, maxima.preference_max);
  const double tour_c = kind == TickKind::Night
                            ? 1.0
                            : inverse_criterion(cell.tourism, maxima.tourism_max);
  const double dist_c = 1.0 - std::log2(dist_m / fisher.radius_m + 1.0);
  // Keep this association: the engine caches (pref + tour) + dist per zone
  // and must produce bit-identical scores.
  const double static_part = (pref_c + tour_c) + dist_c;
  const double biom_c =
      direct_criterion(cell.fishable_biomass(), maxima.biomass_max);
  const double fisher_c = occupied ? 0.2 : 0.4;
  return (static_part + biom_c) + fisher_c;
}

int roulette_pick(std::span<const double> weights, Rng& rng) {
  assert(!weights.empty());
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

int argmax_pick(std::span<const double> weights, Rng& rng) {
  assert(!weights.empty());
  double best = -std::numeric_limits<double>::infinity();
  int ties = 0;
  for (double w : weights)
    if (w > best) best = w;
  for (double w : weights)
    if (w == best) ++ties;
  int target = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(ties)));
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] == best && target-- == 0) return static_cast<int>(i);
  return 0;  // unreachable
}

std::optional<ChoiceResult> choose_fishing_cell(
    const Fisher& fisher, const WorldGrid& world,
    std::span<const int> candidates, std::span<const double> dist_m,
    const LayerMaxima& maxima, const std::vector<int>& occupancy,
    bool mpa_allowed, TickKind kind, ChoiceRule rule, Rng& rng) {
  assert(candidates.size() == dist_m.size());

  std::vector<int> usable;
  std::vector<double> weights;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int cell = candidates[i];
    if (!mpa_allowed && world.at(cell).mpa) continue;
    usable.push_back(cell);
    weights.push_back(score_cell(world.at(cell), fisher, dist_m[i], maxima,
                                 occupancy[static_cast<std::size_t>(cell)] > 0,
                                 kind));
  }
  if (usable.empty()) return std::nullopt;

  const int pick = rule == ChoiceRule::Roulette ? roulette_pick(weights, rng)
                                                : argmax_pick(weights, rng);
  const int chosen = usable[static_cast<std::size_t>(pick)];

  // Relocation stays inside the candidate set (so the fishing radius and the
  // poaching gate keep holding afterwards).
  auto eligible = [&](int cell) {
    if (!mpa_allowed && world.at(cell).mpa) return false;
    return std::binary_search(candidates.begin(), candidates.end(), cell);
  };
  const RelocationResult r = resolve_relocation(world, chosen, occupancy, eligible, rng);
  return ChoiceResult{r.cell, chosen, r.relocated};
}

double fish(const Fisher& fisher, Cell& cell, TickKind kind,
            double capture_rate_day_per_hour, std::optional<double> quota_kg) {
  const double rate = kind == TickKind::Night ? 2.0 * capture_rate_day_per_hour
                                              : capture_rate_day_per_hour;
  const double available = cell.fishable_biomass();
  double catch_kg = available * fisher.trip_duration_h *
                    (1.0 - fisher.selectivity) * rate;
  if (quota_kg) catch_kg = std::min(catch_kg, *quota_kg);
  catch_kg = std::min(catch_kg, available);
  // Quantize to 1e-9 kg so catch accounting sums exactly in any order.
  catch_kg = std::nearbyint(catch_kg * 1e9) / 1e9;
  if (catch_kg <= 0.0) return 0.0;

  const double herb_part = catch_kg * (cell.fish[kHerbivore] / available);
  const double carn_part = catch_kg - herb_part;
  cell.fish[kHerbivore] = std::max(0.0, cell.fish[kHerbivore] - herb_part);
  cell.fish[kCarnivore] = std::max(0.0, cell.fish[kCarnivore] - carn_part);
  return catch_kg;
}

std::pair<int, int> record_conflicts(int n_other_fishers, double tourism_level,
                                     TickKind kind, double tourism_threshold) {
  const int fisher_conflict = n_other_fishers >= 1 ? 1 : 0;
  const int tourism_conflict =
      (kind == TickKind::Day && tourism_level > tourism_threshold) ? 1 : 0;
  return {fisher_conflict, tourism_conflict};
}

}  // namespace reefsim
