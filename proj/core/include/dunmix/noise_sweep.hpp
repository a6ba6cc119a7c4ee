#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "dunmix/synth.hpp"
#include "dunmix/unmixer.hpp"

namespace dunmix {

struct NoiseSweepConfig {
  std::vector<double> sigma_levels{0.0, 1e-4, 3e-4, 1e-3, 3e-3};
  std::size_t mixtures_per_level = 10;
  double temperature = 330.0;
  /// Endmember variability of the synthetic mixtures.
  PerturbSpec perturb{.within_box = true};
  UnmixConfig unmix;
  std::uint64_t seed = 7;
};

struct NoiseSweepRow {
  double sigma_radiance = 0.0;
  /// Mean abundance MSE over the level's mixtures.
  double abs_mse = 0.0;
  double fcls_mse = 0.0;
};

/// For each noise level: synthesize mixtures (the same abundances and
/// perturbations at every level), unmix with analysis-by-synthesis and with
/// FCLS on the unperturbed library, and average the abundance MSEs.
std::vector<NoiseSweepRow> noise_sweep(const EndmemberLibrary& library,
                                       const NoiseSweepConfig& config);

void write_noise_sweep_csv(std::ostream& out, const std::vector<NoiseSweepRow>& rows);

/// Mean squared difference between two abundance vectors.
double abundance_mse(const SimplexVector& estimate, const SimplexVector& truth);

}  // namespace dunmix
