#include "dunmix/optim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "dunmix/errors.hpp"

namespace dunmix {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInput("adam: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidInput("adam: beta1 must be in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidInput("adam: beta2 must be in [0,1)");
  if (!(epsilon > 0.0)) throw InvalidInput("adam: epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw InvalidInput("adam: weight_decay must be >= 0");
  if (steps == 0) throw InvalidInput("adam: steps must be positive");
}

SimplexVector::SimplexVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("simplex vector must be non-empty");
  double sum = 0.0;
  for (double x : values_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("simplex entries must be finite and >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw InvalidInput("simplex entries must sum to 1");
}

SimplexVector SimplexVector::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("simplex vector must be non-empty");
  return SimplexVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void project_simplex_inplace(std::span<double> v) {
  if (v.empty()) throw InvalidInput("cannot project an empty vector onto the simplex");
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("simplex projection needs finite entries");
  }
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(x - tau, 0.0);
    sum += x;
  }
  // Remove the last few ulps of drift so downstream strict checks hold.
  if (sum > 0.0) {
    for (double& x : v) x /= sum;
  }
}

SimplexVector project_simplex(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  project_simplex_inplace(out);
  return SimplexVector(std::move(out));
}

void project_box(std::span<double> p, std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != p.size() || upper.size() != p.size()) {
    throw InvalidInput("box bounds must match the parameter length");
  }
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
}

std::vector<double> project_box(std::span<const double> p, const FlatBounds& box) {
  std::vector<double> out(p.begin(), p.end());
  project_box(out, box.lower, box.upper);
  return out;
}

DispersionParams project_box(const DispersionParams& p, const ParamBox& box) {
  if (!same_shape(p, box.lower())) throw InvalidInput("params and box shapes differ");
  FlatBounds bounds = flatten_box(box, true);
  auto flat = flatten(p);
  // Alpha is not boxed: keep the caller's weights.
  const ParamLayout layout(p);
  for (std::size_t m = 0; m < layout.axis_count(); ++m) {
    bounds.lower[layout.alpha(m)] = bounds.upper[layout.alpha(m)] = flat[layout.alpha(m)];
  }
  project_box(flat, bounds.lower, bounds.upper);
  return unflatten(p, flat);
}

AdamState::AdamState(std::vector<double> init, std::vector<double> scale)
    : params(std::move(init)),
      m(params.size(), 0.0),
      v(params.size(), 0.0),
      step_scale(std::move(scale)) {
  if (!step_scale.empty() && step_scale.size() != params.size()) {
    throw InvalidInput("adam: step_scale length must match the parameter length");
  }
}

void adam_step(AdamState& s, std::span<const double> gradient, const AdamConfig& c,
               const Projection& project) {
  if (gradient.size() != s.params.size()) throw InvalidInput("adam: gradient length mismatch");
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i])) {
      throw NumericalFailure("adam: non-finite gradient at coordinate " + std::to_string(i),
                             static_cast<std::ptrdiff_t>(s.t));
    }
  }
  ++s.t;
  const double t = static_cast<double>(s.t);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < s.params.size(); ++i) {
    const double g = gradient[i] + c.weight_decay * s.params[i];
    s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * g;
    s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = s.m[i] / bc1;
    const double v_hat = s.v[i] / bc2;
    const double lr = s.step_scale.empty() ? c.learning_rate : c.learning_rate * s.step_scale[i];
    s.params[i] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
  if (project) project(s.params);
}

namespace {

double evaluate(const Objective& f, std::span<const double> x, std::span<double> grad,
                std::size_t iteration) {
  const double loss = f(x, grad);
  if (!std::isfinite(loss)) {
    throw NumericalFailure("objective returned a non-finite loss",
                           static_cast<std::ptrdiff_t>(iteration));
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw NumericalFailure("objective returned a non-finite gradient",
                             static_cast<std::ptrdiff_t>(iteration));
    }
  }
  return loss;
}

// Tracks the best iterate and the early-stop window.
class Tracker {
 public:
  explicit Tracker(EarlyStop stop) : stop_(stop) {}

  void record(double loss, std::span<const double> x, MinimizeResult& r) {
    r.loss_trace.push_back(loss);
    if (r.best.empty() || loss < r.best_loss) {
      r.best.assign(x.begin(), x.end());
      r.best_loss = loss;
    }
    running_best_.push_back(r.best_loss);
  }

  bool should_stop() const {
    if (stop_.patience == 0 || running_best_.size() <= stop_.patience) return false;
    const std::size_t n = running_best_.size();
    return running_best_[n - 1 - stop_.patience] - running_best_[n - 1] < stop_.min_improvement;
  }

 private:
  EarlyStop stop_;
  std::vector<double> running_best_;
};

}  // namespace

MinimizeResult minimize_projected(const Objective& objective, std::vector<double> init,
                                  const Projection& project, const AdamConfig& config,
                                  EarlyStop stop, std::vector<double> step_scale) {
  config.validate();
  if (project) project(init);
  AdamState state(std::move(init), std::move(step_scale));
  std::vector<double> grad(state.params.size());
  MinimizeResult result;
  Tracker tracker(stop);

  for (std::size_t it = 0; it <= config.steps; ++it) {
    const double loss = evaluate(objective, state.params, grad, it);
    tracker.record(loss, state.params, result);
    if (it == config.steps || tracker.should_stop()) break;
    adam_step(state, grad, config, project);
  }
  return result;
}

MinimizeResult minimize_projected_gradient(const Objective& objective, std::vector<double> init,
                                           const Projection& project,
                                           const ProjectedGradientConfig& config) {
  if (!(config.step_size > 0.0) || !std::isfinite(config.step_size)) {
    throw InvalidInput("projected gradient: step_size must be finite and > 0");
  }
  if (project) project(init);
  const std::size_t n = init.size();
  std::vector<double> x = std::move(init);
  std::vector<double> x_prev = x;
  std::vector<double> y = x;
  std::vector<double> grad(n);
  std::vector<double> scratch(n);
  MinimizeResult result;
  Tracker tracker(config.stop);

  double loss = evaluate(objective, x, grad, 0);
  tracker.record(loss, x, result);
  double momentum_t = 1.0;

  for (std::size_t it = 1; it <= config.max_steps; ++it) {
    // grad currently holds the gradient at y.
    for (std::size_t i = 0; i < n; ++i) scratch[i] = y[i] - config.step_size * grad[i];
    if (project) project(scratch);
    x_prev.swap(x);
    x.swap(scratch);

    const double new_loss = evaluate(objective, x, grad, it);
    tracker.record(new_loss, x, result);
    if (tracker.should_stop()) break;

    if (!config.accelerated || new_loss > loss) {
      // Plain step, or restart after a non-monotone accelerated step.
      momentum_t = 1.0;
      y = x;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
      const double beta = (momentum_t - 1.0) / t_next;
      momentum_t = t_next;
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * (x[i] - x_prev[i]);
      if (beta != 0.0) evaluate(objective, y, grad, it);
    }
    loss = new_loss;
  }
  return result;
}

}  // namespace dunmix
