#pragma once

// Sparse box-constrained regression of dispersion parameters to a measured
// emissivity spectrum, with band pruning and 1-vs-2 axis selection.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dunmix/optim.hpp"
#include "dunmix/types.hpp"

namespace dunmix {

/// Wide validity box used while fitting.
struct FitBoxRule {
  /// omega0 may leave the grid range by this fraction of the grid span.
  double omega0_margin = 0.05;
  double gamma_min = 1e-3;
  double gamma_max = 1.0;
  double rho_max = 5.0;
  double eps_r_max = 10.0;
};

/// Adam step multipliers per parameter family (learning rate x scale).
struct FitStepScales {
  double omega0 = 100.0;
  double gamma = 0.1;
  double rho = 1.0;
  double eps_r = 1.0;
  double alpha = 1.0;
};

struct FitConfig {
  std::size_t k_init = 50;
  double lambda_rho = 0.01;
  double prune_threshold = 1e-3;
  std::size_t restarts = 4;
  std::uint64_t seed = 7;
  /// Axis count M for fit_endmember (1 or 2); select_axis_count ignores it.
  std::size_t axes = 1;
  FitBoxRule box;
  FitStepScales step_scales;
  AdamConfig optimizer{0.01, 0.9, 0.999, 1e-8, 0.0, 3000};
  /// Steps for the unregularized refit after pruning.
  std::size_t refit_steps = 1500;

  void validate() const;
};

struct FitResult {
  DispersionParams params;
  /// Mean squared error of the rendered fit against the target.
  double mse = 0.0;
  std::size_t k_final = 0;
  std::size_t axis_count = 1;
  /// Sparse-regression trace followed by the refit trace.
  std::vector<double> loss_trace;
  /// The box the fit was constrained to.
  ParamBox box;
  /// MSE of the sparse fit before pruning, and the summed rho of the bands
  /// pruned from it (zero when pruning cost too much and every band was kept).
  double pre_prune_mse = 0.0;
  double pruned_rho_mass = 0.0;
};

/// Validity box for a model of `shape`'s structure on `grid`.
ParamBox make_fit_box(const DispersionParams& shape, const WavenumberGrid& grid,
                      const FitBoxRule& rule);

/// Random initial model with `k` bands per axis (omega0 uniform over the
/// grid range, gamma in [0.01, 0.2], rho in [0, 0.1], eps_r in [1, 3]).
DispersionParams random_initial_params(const WavenumberGrid& grid, std::size_t axes,
                                       std::size_t k, std::uint64_t seed);

/// Best-of-restarts fit with config.axes optical axes. Throws
/// NumericalFailure when every restart diverges.
FitResult fit_endmember(const Spectrum& target, const FitConfig& config);

/// Fits one and two axes and keeps the lower MSE (ties go to one axis).
FitResult select_axis_count(const Spectrum& target, const FitConfig& config);

/// Relative tolerances per parameter family for unmixing-time refinement.
struct ToleranceSet {
  double rho = 0.05;
  double gamma = 0.005;
  double eps_r = 0.001;
  double omega0 = 0.0001;
};

/// Box fitted -/+ tol * |fitted| per family, intersected with validity bounds.
ParamBox make_tolerance_box(const DispersionParams& fitted, const ToleranceSet& tol = {});

}  // namespace dunmix
