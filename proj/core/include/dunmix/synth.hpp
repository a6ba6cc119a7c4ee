#pragma once

// Synthetic data: parameter perturbation, linear mixtures of rendered
// endmembers, and blackbody-shaped emissivity noise.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dunmix/optim.hpp"
#include "dunmix/parallel.hpp"
#include "dunmix/types.hpp"
#include "dunmix/unmixer.hpp"

namespace dunmix {

/// Second radiation constant c2 = h c / k_B in cm K.
inline constexpr double kSecondRadiationConstant = 1.4387768775;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct PerturbSpec {
  /// Additive shift of every omega0 (cm^-1).
  Range omega0_shift{0.0, 0.0};
  /// Multiplicative factors.
  Range gamma_scale{1.0, 1.0};
  Range rho_scale{1.0, 1.0};
  Range eps_scale{1.0, 1.0};
  /// Ignore the ranges and draw every parameter uniformly inside the
  /// endmember's tolerance box (library perturbation only).
  bool within_box = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoiseSpec {
  /// Radiance-domain standard deviation relative to the peak-normalized blackbody.
  double sigma_radiance = 0.0;
  double temperature = 330.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Shifts omega0 and scales gamma / rho / eps_r by independent uniform draws,
/// clamped to the parameter validity bounds.
DispersionParams perturb_params(const DispersionParams& params, const PerturbSpec& spec);

/// Every boxed parameter drawn uniformly inside `box`.
DispersionParams perturb_within_box(const DispersionParams& params, const ParamBox& box,
                                    std::uint64_t seed);

/// Perturbs every library entry with a per-entry derived seed.
std::vector<DispersionParams> perturb_library(const EndmemberLibrary& library,
                                              const PerturbSpec& spec);

/// Unnormalized Planck shape omega^3 / (exp(c2 omega / T) - 1).
double planck(double omega, double temperature);

/// Wavenumber of the Planck maximum, 2.821439... T / c2.
double planck_peak_wavenumber(double temperature);

/// Planck shape on the grid divided by its maximum over the grid.
std::vector<double> planck_normalized(const WavenumberGrid& grid, double temperature);

/// Per-sample noise standard deviation sigma_radiance / sqrt(B_norm).
std::vector<double> emissivity_noise_sigma(const WavenumberGrid& grid, const NoiseSpec& noise);

/// Adds independent zero-mean Gaussian noise with the blackbody profile.
/// The result is flagged as measured.
Spectrum emissivity_noise(const Spectrum& spectrum, const NoiseSpec& noise);

struct GroundTruth {
  SimplexVector abundances;
  std::vector<DispersionParams> perturbed;
  std::uint64_t perturb_seed = 0;
  std::uint64_t noise_seed = 0;
  double sigma_radiance = 0.0;
  double temperature = 330.0;
};

struct SynthSample {
  MixedSpectrum mixed;
  GroundTruth truth;
};

/// b = sum_j x_j render(perturb(Lambda_j)) + noise.
SynthSample synth_mixture(const EndmemberLibrary& library, const SimplexVector& abundances,
                          const PerturbSpec& perturb, const NoiseSpec& noise);

/// Re-renders the noiseless mixture from a ground-truth record.
Eigen::VectorXd replay_noiseless(const GroundTruth& truth, const WavenumberGrid& grid);

/// Uniform draw on the simplex (symmetric Dirichlet with concentration 1).
/// With `active` set, all but `active` random entries are zero.
SimplexVector sample_abundances(std::size_t n, Rng& rng, std::optional<std::size_t> active = {});

struct DatasetConfig {
  std::size_t count = 1000;
  PerturbSpec perturb;
  NoiseSpec noise;
  std::uint64_t seed = 7;
  std::optional<std::size_t> active_endmembers;
};

/// Independent mixtures; sample i uses streams derived from (seed, i), so the
/// output does not depend on worker count.
std::vector<SynthSample> generate_dataset(const EndmemberLibrary& library,
                                          const DatasetConfig& config);

}  // namespace dunmix
