#pragma once

// Linear unmixing with endmember variability.
//
// The x-step solves the simplex-constrained, Lp-regularized least squares
// problem by accelerated projected gradient on the E x E normal equations;
// the Lambda-step takes projected Adam steps on every endmember's dispersion
// parameters with gradients from render_with_gradient().

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "dunmix/optim.hpp"
#include "dunmix/types.hpp"

namespace dunmix {

struct Endmember {
  std::string name;
  DispersionParams params;
  ParamBox box;
};

class EndmemberLibrary {
 public:
  EndmemberLibrary(WavenumberGrid grid, std::vector<Endmember> entries);

  const WavenumberGrid& grid() const noexcept { return grid_; }
  std::span<const Endmember> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Endmember& operator[](std::size_t i) const noexcept { return entries_[i]; }

  /// Same entries with params replaced (boxes kept). Throws if any param
  /// leaves its box.
  EndmemberLibrary with_params(std::vector<DispersionParams> params) const;

 private:
  WavenumberGrid grid_;
  std::vector<Endmember> entries_;
};

/// Observed emissivity b on the library grid.
class MixedSpectrum {
 public:
  MixedSpectrum(WavenumberGrid grid, std::vector<double> values);
  explicit MixedSpectrum(const Spectrum& s);

  const WavenumberGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  Eigen::Map<const Eigen::VectorXd> vector() const {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

 private:
  WavenumberGrid grid_;
  std::vector<double> values_;
};

struct AbundanceSolverConfig {
  /// Maximum accelerated projected-gradient iterations.
  std::size_t max_steps = 20000;
  /// Stop when the best objective improves by less than `tolerance` over
  /// `patience` iterations.
  std::size_t patience = 50;
  double tolerance = 1e-15;
};

struct UnmixConfig {
  double p = 0.95;
  double lambda_p = 1e-4;
  /// Smoothing constant in sum_j (x_j + p_epsilon)^p.
  double p_epsilon = 1e-8;
  std::size_t outer_iters = 100;
  AbundanceSolverConfig x_solver;
  /// Lambda-step optimizer; `steps` is the number of Adam steps per outer iteration.
  AdamConfig lambda_step{0.01, 0.9, 0.999, 1e-8, 0.0, 1};
  /// Scale each coordinate's Adam step by its box width, so the learning
  /// rate is a fraction of the box rather than an absolute amount.
  bool box_scaled_steps = true;

  void validate() const;
};

struct UnmixResult {
  SimplexVector abundances;
  std::vector<DispersionParams> refined;
  double residual_rms = 0.0;
  /// Objective of each outer iterate (after its x-step).
  std::vector<double> loss_trace;
  /// Objective of the returned iterate.
  double objective = 0.0;
};

/// N x E matrix whose column j renders endmember j on the library grid.
Eigen::MatrixXd build_A(const EndmemberLibrary& library);
Eigen::MatrixXd build_A(const std::vector<DispersionParams>& params, const WavenumberGrid& grid);

/// ||b - A x||^2 + lambda_p * sum_j (x_j + p_epsilon)^p.
double unmix_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       std::span<const double> x, double p, double lambda_p, double p_epsilon);

/// Simplex-constrained Lp-regularized least squares from the uniform start.
SimplexVector solve_abundances(const Eigen::MatrixXd& A, const MixedSpectrum& b, double p,
                               double lambda_p, const AbundanceSolverConfig& config = {},
                               double p_epsilon = 1e-8);

/// Fully constrained least squares (lambda_p = 0).
SimplexVector fcls(const Eigen::MatrixXd& A, const MixedSpectrum& b,
                   const AbundanceSolverConfig& config = {});

/// Alternating minimization over abundances and endmember parameters,
/// starting from the library's params. Returns the best-objective iterate.
UnmixResult analysis_by_synthesis(const EndmemberLibrary& library, const MixedSpectrum& b,
                                  const UnmixConfig& config = {});

/// RMS of b - A x.
double residual_rms(const Eigen::MatrixXd& A, const MixedSpectrum& b, const SimplexVector& x);

}  // namespace dunmix
