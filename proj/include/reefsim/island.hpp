#pragma once

#include <cstdint>

#include "reefsim/world.hpp"

namespace reefsim {

// Desk-scale ring island: land core, lagoon annulus, one-cell reef crest
// broken by passes, outer-slope annulus, open ocean beyond. Layer means
// default to the Moorea survey values.
struct IslandSpec {
  int n_rows = 60;
  int n_cols = 60;
  double cell_size_m = 100.0;

  int n_passes = 2;
  int n_mpas = 4;
  int n_districts = 6;

  // Lagoon width in cells, varies smoothly with coastline angle.
  double lagoon_width_min = 4.0;
  double lagoon_width_max = 8.0;
  double slope_width = 3.0;

  double mpa_lagoon_fraction = 0.20;  // share of lagoon cells inside MPAs

  // Benthic cover means (fractions).
  double coral_lagoon = 0.26;
  double turf_lagoon = 0.20;
  double coral_slope = 0.44;
  double turf_slope = 0.33;
  double macroalgae = 0.03;

  // Fish biomass means over fishable cells (kg per cell).
  double herbivores_mean = 305.0;
  double corallivores_mean = 25.3;
  double carnivores_mean = 78.5;

  double preference_mean = 1.0;
  double tourism_mean = 2.0;

  // Relative amplitude of the smooth spatial variation around each mean.
  double field_roughness = 0.15;
};

WorldGrid generate_synthetic_island(const IslandSpec& spec, std::uint64_t seed);

}  // namespace reefsim
