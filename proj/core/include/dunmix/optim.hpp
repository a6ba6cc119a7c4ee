#pragma once

// Projected first-order optimizers: bias-corrected Adam with a projection
// after every step, and accelerated projected gradient for smooth problems
// with a known Lipschitz constant.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dunmix/param_layout.hpp"
#include "dunmix/types.hpp"

namespace dunmix {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  std::size_t steps = 500;

  /// Throws InvalidInput when an invariant is violated.
  void validate() const;
};

/// Nonnegative vector summing to one (within 1e-10).
class SimplexVector {
 public:
  explicit SimplexVector(std::vector<double> values);
  static SimplexVector uniform(std::size_t n);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  std::vector<double> values_;
};

/// Euclidean projection onto the probability simplex (sort-and-threshold).
SimplexVector project_simplex(std::span<const double> v);

/// In-place variant used by optimizer callbacks.
void project_simplex_inplace(std::span<double> v);

/// Elementwise clamp into [lower, upper].
void project_box(std::span<double> p, std::span<const double> lower, std::span<const double> upper);
std::vector<double> project_box(std::span<const double> p, const FlatBounds& box);
DispersionParams project_box(const DispersionParams& p, const ParamBox& box);

/// In-place projection applied after each optimizer step.
using Projection = std::function<void(std::span<double>)>;

struct AdamState {
  std::vector<double> params;
  std::vector<double> m;
  std::vector<double> v;
  /// Optional per-coordinate multiplier on the learning rate (empty = 1).
  std::vector<double> step_scale;
  std::size_t t = 0;

  explicit AdamState(std::vector<double> init, std::vector<double> scale = {});
};

/// One bias-corrected Adam update, then `project` if given. Throws
/// NumericalFailure on a non-finite gradient.
void adam_step(AdamState& state, std::span<const double> gradient, const AdamConfig& config,
               const Projection& project = {});

/// Loss at `x`, writing the gradient into `grad` (same length as x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Stop once the best loss improved by less than `min_improvement` over the
/// last `patience` iterations. patience == 0 disables early stopping.
struct EarlyStop {
  std::size_t patience = 0;
  double min_improvement = 0.0;
};

struct MinimizeResult {
  std::vector<double> best;
  double best_loss = 0.0;
  /// Loss of every evaluated iterate, in order.
  std::vector<double> loss_trace;
};

/// Projected Adam from `init` (projected first). Returns the best-seen
/// iterate. Throws NumericalFailure with the iteration index on a
/// non-finite loss or gradient.
MinimizeResult minimize_projected(const Objective& objective, std::vector<double> init,
                                  const Projection& project, const AdamConfig& config,
                                  EarlyStop stop = {}, std::vector<double> step_scale = {});

struct ProjectedGradientConfig {
  /// Step length, normally 1 / L for an L-smooth objective.
  double step_size = 0.0;
  std::size_t max_steps = 5000;
  EarlyStop stop{50, 1e-15};
  /// Nesterov momentum with function-value restart.
  bool accelerated = true;
};

/// Projected gradient descent; every iterate is feasible. Same return and
/// failure contract as minimize_projected().
MinimizeResult minimize_projected_gradient(const Objective& objective, std::vector<double> init,
                                           const Projection& project,
                                           const ProjectedGradientConfig& config);

}  // namespace dunmix
