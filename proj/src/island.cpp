#include "reefsim/island.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "reefsim/rng.hpp"

namespace reefsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Smooth periodic profile of the unit circle: a few random Fourier modes.
class AngularProfile {
public:
  AngularProfile(std::uint64_t seed, int modes = 3) {
    Rng rng(seed);
    amp_.resize(static_cast<std::size_t>(modes));
    phase_.resize(static_cast<std::size_t>(modes));
    for (int k = 0; k < modes; ++k) {
      amp_[static_cast<std::size_t>(k)] = rng.uniform(0.0, 1.0) / (k + 1);
      phase_[static_cast<std::size_t>(k)] = rng.uniform(0.0, kTwoPi);
    }
  }

  // In [0, 1], smooth and 2*pi-periodic.
  double at(double theta) const {
    double v = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k) {
      v += amp_[k] * std::sin((static_cast<double>(k) + 1.0) * theta + phase_[k]);
      norm += amp_[k];
    }
    return norm > 0.0 ? 0.5 + 0.5 * v / norm : 0.5;
  }

private:
  std::vector<double> amp_;
  std::vector<double> phase_;
};

// Value noise on a coarse lattice with bilinear interpolation; values in
// [0,1] with a fixed seed per layer.
class ValueNoise {
public:
  ValueNoise(std::uint64_t seed, int rows, int cols, int step)
      : step_(step),
        nodes_r_(rows / step + 2),
        nodes_c_(cols / step + 2),
        node_(static_cast<std::size_t>(nodes_r_) * static_cast<std::size_t>(nodes_c_)) {
    Rng rng(seed);
    for (double& v : node_) v = rng.uniform01();
  }

  double at(int r, int c) const {
    const double fr = static_cast<double>(r) / step_;
    const double fc = static_cast<double>(c) / step_;
    const int r0 = static_cast<int>(fr), c0 = static_cast<int>(fc);
    const double tr = fr - r0, tc = fc - c0;
    auto n = [&](int rr, int cc) {
      return node_[static_cast<std::size_t>(rr) * static_cast<std::size_t>(nodes_c_) +
                   static_cast<std::size_t>(cc)];
    };
    const double top = n(r0, c0) * (1 - tc) + n(r0, c0 + 1) * tc;
    const double bot = n(r0 + 1, c0) * (1 - tc) + n(r0 + 1, c0 + 1) * tc;
    return top * (1 - tr) + bot * tr;
  }

private:
  int step_;
  int nodes_r_, nodes_c_;
  std::vector<double> node_;
};

struct Polar {
  double radius;
  double theta;  // in [0, 2*pi)
};

Polar polar_of(const IslandSpec& spec, int r, int c) {
  const double cy = (spec.n_rows - 1) / 2.0;
  const double cx = (spec.n_cols - 1) / 2.0;
  const double dy = r - cy, dx = c - cx;
  double theta = std::atan2(dy, dx);
  if (theta < 0) theta += kTwoPi;
  return {std::hypot(dx, dy), theta};
}

// Scales a layer so the mean over the given cells equals target exactly.
void normalize_mean(WorldGrid& world, const std::vector<int>& cells,
                    double target, double Cell::*field) {
  if (cells.empty() || target <= 0.0) return;
  double sum = 0.0;
  for (int i : cells) sum += world.at(i).*field;
  if (sum <= 0.0) return;
  const double scale = target * static_cast<double>(cells.size()) / sum;
  for (int i : cells) world.at(i).*field *= scale;
}

void normalize_fish_mean(WorldGrid& world, const std::vector<int>& cells,
                         double target, int group) {
  if (cells.empty() || target <= 0.0) return;
  double sum = 0.0;
  for (int i : cells) sum += world.at(i).fish[static_cast<std::size_t>(group)];
  if (sum <= 0.0) return;
  const double scale = target * static_cast<double>(cells.size()) / sum;
  for (int i : cells) world.at(i).fish[static_cast<std::size_t>(group)] *= scale;
}

}  // namespace

WorldGrid generate_synthetic_island(const IslandSpec& spec, std::uint64_t seed) {
  if (spec.n_rows < 16 || spec.n_cols < 16)
    throw ValidationError("island grid must be at least 16x16");
  if (spec.n_passes < 1) throw ValidationError("island needs at least one pass");
  if (spec.n_districts < 1) throw ValidationError("island needs at least one district");
  if (spec.n_mpas < 0) throw ValidationError("negative MPA count");
  if (spec.lagoon_width_min < 2.0 || spec.lagoon_width_max < spec.lagoon_width_min)
    throw ValidationError("bad lagoon width range");

  WorldGrid world;
  world.n_rows = spec.n_rows;
  world.n_cols = spec.n_cols;
  world.cell_size_m = spec.cell_size_m;
  world.cells.assign(static_cast<std::size_t>(world.size()), Cell{});

  const double extent = 0.5 * std::min(spec.n_rows, spec.n_cols);
  const double crest_outer_max = extent - 2.0;  // keep ocean at the border
  const double land_radius_mean =
      crest_outer_max - spec.slope_width - spec.lagoon_width_max - 2.0;
  if (land_radius_mean < 3.0)
    throw ValidationError("grid too small for the requested lagoon and slope widths");

  const AngularProfile coast(Rng::child_seed(seed, 1));
  const AngularProfile lagoon(Rng::child_seed(seed, 2));
  Rng layout_rng(Rng::child_seed(seed, 3));

  // Pass gaps: evenly spaced directions with a seeded rotation.
  const double pass_rotation = layout_rng.uniform(0.0, kTwoPi);
  const double crest_radius_ref = land_radius_mean + spec.lagoon_width_max;
  const double pass_half_angle = 1.3 / crest_radius_ref;  // ~2-3 cells wide
  if (static_cast<double>(spec.n_passes) * 2.0 * pass_half_angle > 0.5 * kTwoPi)
    throw ValidationError("too many passes for the reef circumference");

  auto near_pass = [&](double theta) {
    for (int k = 0; k < spec.n_passes; ++k) {
      const double center =
          std::fmod(pass_rotation + kTwoPi * k / spec.n_passes, kTwoPi);
      double d = std::abs(theta - center);
      d = std::min(d, kTwoPi - d);
      if (d <= pass_half_angle) return true;
    }
    return false;
  };

  // Habitat classes from concentric, angle-modulated radii.
  for (int r = 0; r < spec.n_rows; ++r)
    for (int c = 0; c < spec.n_cols; ++c) {
      const Polar p = polar_of(spec, r, c);
      const double land_r = land_radius_mean * (0.92 + 0.16 * coast.at(p.theta));
      const double lagoon_w =
          spec.lagoon_width_min +
          (spec.lagoon_width_max - spec.lagoon_width_min) * lagoon.at(p.theta);
      const double crest_inner = land_r + lagoon_w;
      // Two cells of crest: a one-cell ring leaves diagonal gaps open under
      // 8-connected movement.
      const double crest_outer = crest_inner + 2.0;
      const double slope_outer = crest_outer + spec.slope_width;

      Cell& cell = world.at(r, c);
      if (p.radius <= land_r)
        cell.habitat = HabitatClass::Land;
      else if (p.radius <= crest_inner)
        cell.habitat = HabitatClass::Lagoon;
      else if (p.radius <= crest_outer)
        cell.habitat = near_pass(p.theta) ? HabitatClass::Pass : HabitatClass::ReefCrest;
      else if (p.radius <= slope_outer)
        cell.habitat = HabitatClass::OuterSlope;
      else
        cell.habitat = HabitatClass::OpenOcean;
    }

  // Districts partition everything but open ocean by coastline angle.
  const double district_rotation = layout_rng.uniform(0.0, kTwoPi);
  for (int i = 0; i < world.size(); ++i) {
    Cell& cell = world.at(i);
    if (cell.habitat == HabitatClass::OpenOcean) {
      cell.district = kNoDistrict;
      continue;
    }
    const Polar p = polar_of(spec, world.row_of(i), world.col_of(i));
    const double a = std::fmod(p.theta + district_rotation, kTwoPi);
    int d = static_cast<int>(a / kTwoPi * spec.n_districts);
    cell.district = std::clamp(d, 0, spec.n_districts - 1);
  }

  // Count coastal land cells (land adjacent to navigable water) per district.
  {
    std::vector<int> coastal_per_district(static_cast<std::size_t>(spec.n_districts), 0);
    int coastal_total = 0;
    std::array<int, 8> nbr{};
    for (int i = 0; i < world.size(); ++i) {
      if (world.at(i).habitat != HabitatClass::Land) continue;
      const int n = world.neighbors8(i, nbr);
      for (int k = 0; k < n; ++k)
        if (navigable(world.at(nbr[static_cast<std::size_t>(k)]).habitat)) {
          ++coastal_per_district[static_cast<std::size_t>(world.at(i).district)];
          ++coastal_total;
          break;
        }
    }
    if (spec.n_districts > coastal_total)
      throw ValidationError("more districts than coastal land cells");
    for (int d = 0; d < spec.n_districts; ++d)
      if (coastal_per_district[static_cast<std::size_t>(d)] == 0)
        throw ValidationError("district " + std::to_string(d) +
                              " has no coastal land cell");
  }

  // MPAs: contiguous angular sectors spanning lagoon and slope, sized so the
  // protected share of the lagoon hits the target fraction.
  if (spec.n_mpas > 0) {
    if (spec.mpa_lagoon_fraction <= 0.0 || spec.mpa_lagoon_fraction >= 0.9)
      throw ValidationError("mpa_lagoon_fraction out of range");
    const double mpa_rotation = layout_rng.uniform(0.0, kTwoPi);
    const double max_half = 0.5 * kTwoPi / spec.n_mpas;  // sectors must not merge
    double half = spec.mpa_lagoon_fraction * kTwoPi / (2.0 * spec.n_mpas);
    if (half >= max_half)
      throw ValidationError("too many MPAs for the requested lagoon fraction");

    std::vector<int> lagoon_cells;
    for (int i = 0; i < world.size(); ++i)
      if (world.at(i).habitat == HabitatClass::Lagoon) lagoon_cells.push_back(i);

    auto in_sector = [&](double theta, double h) {
      for (int k = 0; k < spec.n_mpas; ++k) {
        const double center =
            std::fmod(mpa_rotation + kTwoPi * k / spec.n_mpas, kTwoPi);
        double d = std::abs(theta - center);
        d = std::min(d, kTwoPi - d);
        if (d <= h) return true;
      }
      return false;
    };

    for (int iter = 0; iter < 12; ++iter) {
      int covered = 0;
      for (int i : lagoon_cells) {
        const Polar p = polar_of(spec, world.row_of(i), world.col_of(i));
        if (in_sector(p.theta, half)) ++covered;
      }
      const double frac = static_cast<double>(covered) /
                          static_cast<double>(lagoon_cells.size());
      if (std::abs(frac - spec.mpa_lagoon_fraction) < 0.01) break;
      const double scale = frac > 0.0 ? spec.mpa_lagoon_fraction / frac : 1.5;
      half = std::min(max_half * 0.999, half * std::clamp(scale, 0.5, 2.0));
    }

    for (int i = 0; i < world.size(); ++i) {
      Cell& cell = world.at(i);
      if (!fishable(cell.habitat)) continue;
      const Polar p = polar_of(spec, world.row_of(i), world.col_of(i));
      cell.mpa = in_sector(p.theta, half);
    }
  }

  // Benthic cover: habitat means modulated by a smooth field; crest carries
  // slope-like cover even though it is neither navigable nor fishable.
  const ValueNoise cover_noise(Rng::child_seed(seed, 4), spec.n_rows, spec.n_cols, 7);
  const ValueNoise fish_noise(Rng::child_seed(seed, 5), spec.n_rows, spec.n_cols, 7);
  const ValueNoise pref_noise(Rng::child_seed(seed, 6), spec.n_rows, spec.n_cols, 9);
  const ValueNoise tour_noise(Rng::child_seed(seed, 7), spec.n_rows, spec.n_cols, 9);
  const double rough = std::clamp(spec.field_roughness, 0.0, 0.5);

  std::vector<int> lagoon_like, slope_like, fishable_all;
  for (int i = 0; i < world.size(); ++i) {
    Cell& cell = world.at(i);
    const int r = world.row_of(i), c = world.col_of(i);
    const double mod_cover = 1.0 + rough * (2.0 * cover_noise.at(r, c) - 1.0);
    const double mod_fish = 1.0 + rough * (2.0 * fish_noise.at(r, c) - 1.0);

    double coral_mean = 0.0, turf_mean = 0.0;
    switch (cell.habitat) {
      case HabitatClass::Lagoon:
      case HabitatClass::Pass:
        coral_mean = spec.coral_lagoon;
        turf_mean = spec.turf_lagoon;
        break;
      case HabitatClass::ReefCrest:
      case HabitatClass::OuterSlope:
        coral_mean = spec.coral_slope;
        turf_mean = spec.turf_slope;
        break;
      default:
        break;
    }
    if (coral_mean > 0.0) {
      cell.coral = coral_mean * mod_cover;
      cell.turf = turf_mean * mod_cover;
      cell.macroalgae = spec.macroalgae;
    }
    if (fishable(cell.habitat)) {
      cell.fish[kHerbivore] = spec.herbivores_mean * mod_fish;
      cell.fish[kCorallivore] = spec.corallivores_mean * mod_fish;
      cell.fish[kCarnivore] = spec.carnivores_mean * mod_fish;
      cell.preference = spec.preference_mean *
                        (1.0 + rough * (2.0 * pref_noise.at(r, c) - 1.0));
      // Tour-operator traffic concentrates in a few lagoon sectors; the
      // outer slope and most of the water see none, so boats can actually
      // steer around it.
      if (cell.habitat != HabitatClass::OuterSlope)
        cell.tourism =
            spec.tourism_mean * std::max(0.0, tour_noise.at(r, c) - 0.55);
      fishable_all.push_back(i);
      if (cell.habitat == HabitatClass::Lagoon) lagoon_like.push_back(i);
      if (cell.habitat == HabitatClass::OuterSlope) slope_like.push_back(i);
    }
  }

  // Pin the spatial means to the requested values exactly.
  normalize_mean(world, lagoon_like, spec.coral_lagoon, &Cell::coral);
  normalize_mean(world, lagoon_like, spec.turf_lagoon, &Cell::turf);
  normalize_mean(world, slope_like, spec.coral_slope, &Cell::coral);
  normalize_mean(world, slope_like, spec.turf_slope, &Cell::turf);
  normalize_fish_mean(world, fishable_all, spec.herbivores_mean, kHerbivore);
  normalize_fish_mean(world, fishable_all, spec.corallivores_mean, kCorallivore);
  normalize_fish_mean(world, fishable_all, spec.carnivores_mean, kCarnivore);
  normalize_mean(world, fishable_all, spec.preference_mean, &Cell::preference);
  normalize_mean(world, fishable_all, spec.tourism_mean, &Cell::tourism);

  world.finalize_initial_state();
  return world;
}

}  // namespace reefsim
