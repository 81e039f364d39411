#include "reefsim/ecology.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace reefsim {

const std::array<const char*, kTrophicCount> kTrophicNames = {
    "coral", "turf", "herbivores", "corallivores", "carnivores"};

namespace {

constexpr int iCoral = static_cast<int>(TrophicGroup::Coral);
constexpr int iTurf = static_cast<int>(TrophicGroup::Turf);
constexpr int iHerb = static_cast<int>(TrophicGroup::Herbivore);
constexpr int iCoro = static_cast<int>(TrophicGroup::Corallivore);
constexpr int iCarn = static_cast<int>(TrophicGroup::Carnivore);

[[noreturn]] void zero_reference_error(const char* group, const char* term) {
  std::ostringstream os;
  os << "calibration: reference value for (" << group << " <- " << term
     << ") is zero or negative";
  throw ValidationError(os.str());
}

}  // namespace

LVParams calibrate_from_reference(const GrowthRates& alphas,
                                  const ReferenceState& ref,
                                  CalibrationMethod method,
                                  double cots_destruction,
                                  bool reject_zero_reference) {
  if (alphas.coral <= 0 || alphas.turf <= 0 || alphas.herbivore <= 0 ||
      alphas.corallivore <= 0 || alphas.carnivore <= 0)
    throw ValidationError("calibration: growth rates must be strictly positive");

  LVParams p;
  p.cots_destruction = cots_destruction;
  p.alpha[iCoral] = alphas.coral;
  p.alpha[iTurf] = alphas.turf;
  p.alpha[iHerb] = alphas.herbivore;
  p.alpha[iCoro] = alphas.corallivore;
  p.alpha[iCarn] = alphas.carnivore;
  // Fish mortality equals growth; benthic groups carry no intrinsic mortality.
  p.gamma[iHerb] = alphas.herbivore;
  p.gamma[iCoro] = alphas.corallivore;
  p.gamma[iCarn] = alphas.carnivore;

  const bool balanced = method == CalibrationMethod::BalancedPartition;

  // One group's coefficients. Inhibitor terms with a positive reference each
  // receive alpha/(n_inhib*y0) (alpha/y0 in literal mode); facilitators
  // receive gamma/(n_fac*z0). Under the balanced partition a group with no
  // surviving inhibitor must not be facilitated either, or the reference
  // state would drift upward.
  struct Term {
    double* coeff;
    double ref;
    const char* name;
  };
  auto assign = [&](const char* group, double alpha, double gamma,
                    std::vector<Term> inhibitors, std::vector<Term> facilitators) {
    std::vector<Term*> live;
    for (Term& t : inhibitors) {
      if (t.ref > 0.0) {
        live.push_back(&t);
      } else if (reject_zero_reference) {
        zero_reference_error(group, t.name);
      } else {
        *t.coeff = 0.0;
      }
    }
    const double n_inhib = static_cast<double>(live.size());
    for (Term* t : live)
      *t->coeff = balanced ? alpha / (n_inhib * t->ref) : alpha / t->ref;

    std::vector<Term*> live_fac;
    for (Term& t : facilitators) {
      if (t.ref > 0.0) {
        live_fac.push_back(&t);
      } else if (reject_zero_reference) {
        zero_reference_error(group, t.name);
      } else {
        *t.coeff = 0.0;
      }
    }
    const double budget = (balanced && live.empty()) ? 0.0 : gamma;
    const double n_fac = static_cast<double>(live_fac.size());
    for (Term* t : live_fac)
      *t->coeff = balanced ? budget / (n_fac * t->ref) : budget / t->ref;
  };

  // The fisher reference of zero is never an error: it simply means fishing
  // is not part of the equations being balanced.
  auto fisher_term = [&](double* coeff) {
    return Term{coeff, ref.fishers, "fisher"};
  };
  std::vector<Term> herb_inhib = {
      {&p.beta_herbivore_carnivore, ref.carnivores, "carnivores"}};
  if (ref.fishers > 0.0) herb_inhib.push_back(fisher_term(&p.beta_fisher_herbivore));
  std::vector<Term> carn_inhib;
  if (ref.fishers > 0.0) carn_inhib.push_back(fisher_term(&p.beta_fisher_carnivore));

  assign("coral", alphas.coral, 0.0,
         {{&p.beta_coral_turf, ref.turf, "turf"},
          {&p.beta_coral_corallivore, ref.corallivores, "corallivores"}},
         {});
  assign("turf", alphas.turf, 0.0,
         {{&p.beta_turf_herbivore, ref.herbivores, "herbivores"},
          {&p.beta_turf_coral, ref.coral, "coral"}},
         {});
  assign("herbivores", alphas.herbivore, p.gamma[iHerb], herb_inhib,
         {{&p.delta_herbivore_turf, ref.turf, "turf"}});
  assign("corallivores", alphas.corallivore, p.gamma[iCoro],
         {{&p.beta_corallivore_carnivore, ref.carnivores, "carnivores"}},
         {{&p.delta_corallivore_coral, ref.coral, "coral"}});
  assign("carnivores", alphas.carnivore, p.gamma[iCarn], carn_inhib,
         {{&p.delta_carnivore_prey, ref.herbivores + ref.corallivores,
           "herbivores+corallivores"}});
  return p;
}

ReferenceState fishable_means(const WorldGrid& world) {
  ReferenceState ref;
  int n = 0;
  for (const Cell& c : world.cells) {
    if (!fishable(c.habitat)) continue;
    ref.coral += c.coral;
    ref.turf += c.turf;
    ref.herbivores += c.fish[kHerbivore];
    ref.corallivores += c.fish[kCorallivore];
    ref.carnivores += c.fish[kCarnivore];
    ++n;
  }
  if (n == 0) throw ValidationError("calibration: world has no fishable cells");
  const double inv = 1.0 / n;
  ref.coral *= inv;
  ref.turf *= inv;
  ref.herbivores *= inv;
  ref.corallivores *= inv;
  ref.carnivores *= inv;
  return ref;
}

CalibratedParams calibrate(const WorldGrid& world, const GrowthRates& alphas,
                           CalibrationMode mode, double mean_fishers_per_cell,
                           double cots_destruction) {
  if (mean_fishers_per_cell < 0.0)
    throw ValidationError("calibration: negative mean fishers per cell");

  CalibratedParams out;
  ReferenceState global_ref = fishable_means(world);
  global_ref.fishers = mean_fishers_per_cell;
  out.global = calibrate_from_reference(alphas, global_ref, mode.method,
                                        cots_destruction,
                                        /*reject_zero_reference=*/true);

  if (mode.scope == CalibrationScope::PerCell) {
    out.per_cell.reserve(world.cells.size());
    for (const Cell& c : world.cells) {
      ReferenceState ref;
      ref.coral = c.coral;
      ref.turf = c.turf;
      ref.herbivores = c.fish[kHerbivore];
      ref.corallivores = c.fish[kCorallivore];
      ref.carnivores = c.fish[kCarnivore];
      ref.fishers = mean_fishers_per_cell;
      // Local zeros drop the term instead of failing: cells legitimately
      // hold no coral, no fish, or nothing at all.
      out.per_cell.push_back(calibrate_from_reference(
          alphas, ref, mode.method, cots_destruction,
          /*reject_zero_reference=*/false));
    }
  }
  return out;
}

TrophicState lv_derivative(const TrophicState& s, const LVParams& p,
                           int n_fishers, bool cots_active) {
  assert(s[iCoral] >= 0 && s[iTurf] >= 0 && s[iHerb] >= 0 && s[iCoro] >= 0 &&
         s[iCarn] >= 0 && n_fishers >= 0);

  const double fishers = static_cast<double>(n_fishers);
  TrophicState d;
  d[iCoral] = s[iCoral] * (p.alpha[iCoral] - p.beta_coral_turf * s[iTurf] -
                           p.beta_coral_corallivore * s[iCoro] -
                           (cots_active ? p.cots_destruction : 0.0));
  d[iTurf] = s[iTurf] * (p.alpha[iTurf] - p.beta_turf_herbivore * s[iHerb] -
                         p.beta_turf_coral * s[iCoral]);
  d[iHerb] = s[iHerb] * (p.alpha[iHerb] - p.gamma[iHerb] -
                         p.beta_herbivore_carnivore * s[iCarn] -
                         p.beta_fisher_herbivore * fishers +
                         p.delta_herbivore_turf * s[iTurf]);
  d[iCoro] = s[iCoro] * (p.alpha[iCoro] - p.gamma[iCoro] -
                         p.beta_corallivore_carnivore * s[iCarn] +
                         p.delta_corallivore_coral * s[iCoral]);
  d[iCarn] = s[iCarn] * (p.alpha[iCarn] - p.gamma[iCarn] -
                         p.beta_fisher_carnivore * fishers +
                         p.delta_carnivore_prey * (s[iHerb] + s[iCoro]));
  return d;
}

void step_cell(Cell& cell, const LVParams& params, double dt_days,
               int n_fishers, bool cots_active) {
  assert(dt_days > 0.0);

  TrophicState s{cell.coral, cell.turf, cell.fish[kHerbivore],
                 cell.fish[kCorallivore], cell.fish[kCarnivore]};
  const TrophicState d = lv_derivative(s, params, n_fishers, cots_active);
  for (int g = 0; g < kTrophicCount; ++g)
    s[static_cast<std::size_t>(g)] = std::max(
        0.0, s[static_cast<std::size_t>(g)] + dt_days * d[static_cast<std::size_t>(g)]);

  // Substrate cap, coral first.
  if (s[iCoral] > cell.substrate_cap) {
    s[iCoral] = cell.substrate_cap;
    s[iTurf] = 0.0;
  } else if (s[iCoral] + s[iTurf] > cell.substrate_cap) {
    s[iTurf] = cell.substrate_cap - s[iCoral];
  }

  cell.coral = s[iCoral];
  cell.turf = s[iTurf];
  cell.fish[kHerbivore] = std::min(s[iHerb], cell.carrying[kHerbivore]);
  cell.fish[kCorallivore] = std::min(s[iCoro], cell.carrying[kCorallivore]);
  cell.fish[kCarnivore] = std::min(s[iCarn], cell.carrying[kCarnivore]);
}

SpilloverReport apply_spillover(WorldGrid& world, double threshold_fraction) {
  if (threshold_fraction <= 0.0 || threshold_fraction > 1.0)
    throw ValidationError("spillover threshold must be in (0, 1]");

  SpilloverReport report;
  const int n = world.size();

  // Fishable neighbors are static; build the adjacency once per call.
  std::vector<std::array<int, 8>> nbrs(static_cast<std::size_t>(n));
  std::vector<int> nbr_count(static_cast<std::size_t>(n), 0);
  std::vector<char> is_fishable(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    is_fishable[static_cast<std::size_t>(i)] = fishable(world.at(i).habitat) ? 1 : 0;
  std::array<int, 8> scratch{};
  for (int i = 0; i < n; ++i) {
    if (!is_fishable[static_cast<std::size_t>(i)]) continue;
    const int m = world.neighbors8(i, scratch);
    int k = 0;
    for (int j = 0; j < m; ++j)
      if (is_fishable[static_cast<std::size_t>(scratch[static_cast<std::size_t>(j)])])
        nbrs[static_cast<std::size_t>(i)][static_cast<std::size_t>(k++)] =
            scratch[static_cast<std::size_t>(j)];
    nbr_count[static_cast<std::size_t>(i)] = k;
  }

  std::vector<double> b0(static_cast<std::size_t>(n));
  std::vector<double> exported(static_cast<std::size_t>(n));
  std::vector<double> inflow(static_cast<std::size_t>(n));
  std::vector<double> ratio(static_cast<std::size_t>(n));

  for (int g = 0; g < kFishGroupCount; ++g) {
    double before = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      b0[si] = world.at(i).fish[static_cast<std::size_t>(g)];
      exported[si] = 0.0;
      inflow[si] = 0.0;
      ratio[si] = 0.0;
      if (is_fishable[si]) before += b0[si];
    }

    // Pass 1: exports and gathered inflow, all from the snapshot.
    for (int i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      if (!is_fishable[si] || nbr_count[si] == 0) continue;
      const double k = world.at(i).carrying[static_cast<std::size_t>(g)];
      const double threshold = threshold_fraction * k;
      if (b0[si] <= threshold) continue;
      const double excess = b0[si] - threshold;
      exported[si] = excess;
      const double share = excess / nbr_count[si];
      for (int j = 0; j < nbr_count[si]; ++j)
        inflow[static_cast<std::size_t>(nbrs[si][static_cast<std::size_t>(j)])] += share;
    }

    // Pass 2: each receiver accepts at most its pre-pass headroom K - B0.
    for (int i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      if (inflow[si] <= 0.0) continue;
      const double headroom =
          std::max(0.0, world.at(i).carrying[static_cast<std::size_t>(g)] - b0[si]);
      ratio[si] = std::min(1.0, headroom / inflow[si]);
    }

    // Pass 3: commit accepted transfers and return the rejected shares.
    for (int i = 0; i < n; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      if (!is_fishable[si]) continue;
      double value = b0[si] - exported[si] + inflow[si] * ratio[si];
      if (exported[si] > 0.0) {
        const double share = exported[si] / nbr_count[si];
        for (int j = 0; j < nbr_count[si]; ++j) {
          const std::size_t sj = static_cast<std::size_t>(
              nbrs[si][static_cast<std::size_t>(j)]);
          const double accepted = share * ratio[sj];
          value += share - accepted;  // rejected share comes home
          report.moved[static_cast<std::size_t>(g)] += accepted;
          const bool from_mpa = world.at(i).mpa;
          const bool to_mpa = world.at(static_cast<int>(sj)).mpa;
          if (from_mpa && !to_mpa) report.mpa_to_outside += accepted;
          if (!from_mpa && to_mpa) report.outside_to_mpa += accepted;
        }
      }
      // Round-off in the return sums may poke a hair above K; shave it.
      world.at(i).fish[static_cast<std::size_t>(g)] =
          std::min(value, world.at(i).carrying[static_cast<std::size_t>(g)]);
    }

    double after = 0.0;
    for (int i = 0; i < n; ++i)
      if (is_fishable[static_cast<std::size_t>(i)])
        after += world.at(i).fish[static_cast<std::size_t>(g)];
    report.total_before[static_cast<std::size_t>(g)] = before;
    report.total_after[static_cast<std::size_t>(g)] = after;
  }
  return report;
}

namespace {

std::string format_exact(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct ParamEntry {
  const char* key;
  double LVParams::*field;
};

struct RateEntry {
  const char* key;
  int group;
  std::array<double, kTrophicCount> LVParams::*field;
};

const ParamEntry kScalarEntries[] = {
    {"beta.coral.turf", &LVParams::beta_coral_turf},
    {"beta.coral.corallivores", &LVParams::beta_coral_corallivore},
    {"beta.turf.herbivores", &LVParams::beta_turf_herbivore},
    {"beta.turf.coral", &LVParams::beta_turf_coral},
    {"beta.herbivores.carnivores", &LVParams::beta_herbivore_carnivore},
    {"beta.corallivores.carnivores", &LVParams::beta_corallivore_carnivore},
    {"beta.herbivores.fisher", &LVParams::beta_fisher_herbivore},
    {"beta.carnivores.fisher", &LVParams::beta_fisher_carnivore},
    {"delta.herbivores.turf", &LVParams::delta_herbivore_turf},
    {"delta.corallivores.coral", &LVParams::delta_corallivore_coral},
    {"delta.carnivores.prey", &LVParams::delta_carnivore_prey},
    {"cots_destruction", &LVParams::cots_destruction},
};

}  // namespace

void save_lv_params(const LVParams& params, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write params file: " + file.string());
  for (int g = 0; g < kTrophicCount; ++g)
    out << "alpha." << kTrophicNames[static_cast<std::size_t>(g)] << " = "
        << format_exact(params.alpha[static_cast<std::size_t>(g)]) << '\n';
  for (int g = iHerb; g <= iCarn; ++g)
    out << "gamma." << kTrophicNames[static_cast<std::size_t>(g)] << " = "
        << format_exact(params.gamma[static_cast<std::size_t>(g)]) << '\n';
  for (const ParamEntry& e : kScalarEntries)
    out << e.key << " = " << format_exact(params.*(e.field)) << '\n';
}

LVParams load_lv_params(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open params file: " + file.string());
  std::map<std::string, double> kv;
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
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    try {
      kv[key] = std::stod(value);
    } catch (const std::exception&) {
      throw ValidationError("params file: bad value for '" + key + "'");
    }
  }

  LVParams p;
  auto take = [&](const std::string& key, double& into) {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ValidationError("params file missing key '" + key + "'");
    into = it->second;
  };
  for (int g = 0; g < kTrophicCount; ++g)
    take(std::string("alpha.") + kTrophicNames[static_cast<std::size_t>(g)],
         p.alpha[static_cast<std::size_t>(g)]);
  for (int g = iHerb; g <= iCarn; ++g)
    take(std::string("gamma.") + kTrophicNames[static_cast<std::size_t>(g)],
         p.gamma[static_cast<std::size_t>(g)]);
  for (const ParamEntry& e : kScalarEntries) take(e.key, p.*(e.field));
  return p;
}

}  // namespace reefsim
