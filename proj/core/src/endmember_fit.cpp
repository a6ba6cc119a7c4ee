#include "dunmix/endmember_fit.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <random>

#include "dunmix/dispersion.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/param_layout.hpp"
#include "dunmix/parallel.hpp"

namespace dunmix {

void FitConfig::validate() const {
  if (k_init < 1) throw InvalidInput("fit: k_init must be >= 1");
  if (!(lambda_rho >= 0.0)) throw InvalidInput("fit: lambda_rho must be >= 0");
  if (!(prune_threshold >= 0.0)) throw InvalidInput("fit: prune_threshold must be >= 0");
  if (restarts < 1) throw InvalidInput("fit: restarts must be >= 1");
  if (axes < 1 || axes > kMaxAxes) throw InvalidInput("fit: axes must be 1 or 2");
  optimizer.validate();
}

namespace {

DispersionParams with_bands(const DispersionParams& shape,
                            const std::vector<std::vector<Band>>& bands,
                            const std::vector<double>& eps_r) {
  std::vector<AxisParams> axes;
  for (std::size_t m = 0; m < shape.axis_count(); ++m) {
    axes.emplace_back(OscillatorBank(bands[m]), eps_r[m]);
  }
  return DispersionParams(std::move(axes), {shape.alpha().begin(), shape.alpha().end()});
}

std::vector<double> step_scales(const DispersionParams& shape, const FitStepScales& s) {
  const ParamLayout layout(shape);
  std::vector<double> out(layout.size());
  for (std::size_t m = 0; m < layout.axis_count(); ++m) {
    out[layout.eps_r(m)] = s.eps_r;
    for (std::size_t k = 0; k < layout.band_count(m); ++k) {
      out[layout.band(m, k, BandField::omega0)] = s.omega0;
      out[layout.band(m, k, BandField::gamma)] = s.gamma;
      out[layout.band(m, k, BandField::rho)] = s.rho;
    }
    out[layout.alpha(m)] = s.alpha;
  }
  return out;
}

struct Stage {
  DispersionParams params;
  std::vector<double> trace;
};

// Minimizes sum (target - model)^2 + lambda * sum(rho) inside `box`.
Stage regress(const Spectrum& target, const DispersionParams& init, const ParamBox& box,
              double lambda, const AdamConfig& adam, const FitStepScales& scales) {
  const ParamLayout layout(init);
  const WavenumberGrid& grid = target.grid();
  const Eigen::Map<const Eigen::VectorXd> y(target.emissivity().data(),
                                            static_cast<Eigen::Index>(target.size()));
  const bool alpha_free = init.axis_count() > 1;
  const FlatBounds bounds = flatten_box(box, alpha_free);

  std::vector<std::size_t> rho_idx;
  for (std::size_t m = 0; m < layout.axis_count(); ++m) {
    for (std::size_t k = 0; k < layout.band_count(m); ++k) {
      rho_idx.push_back(layout.band(m, k, BandField::rho));
    }
  }

  const Projection project = [&](std::span<double> x) {
    project_box(x, bounds.lower, bounds.upper);
    if (alpha_free) project_simplex_inplace(x.subspan(layout.alpha_offset(), layout.axis_count()));
  };

  const Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    const DispersionParams p = unflatten(init, x);
    const RenderJacobian rj = render_with_gradient(p, grid);
    const Eigen::VectorXd r = rj.emissivity - y;
    Eigen::Map<Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(grad.size()));
    g.noalias() = 2.0 * rj.jacobian.transpose() * r;
    double l1 = 0.0;
    for (std::size_t i : rho_idx) {
      l1 += x[i];
      grad[i] += lambda;
    }
    return r.squaredNorm() + lambda * l1;
  };

  MinimizeResult res =
      minimize_projected(objective, flatten(init), project, adam, {}, step_scales(init, scales));
  return {unflatten(init, res.best), std::move(res.loss_trace)};
}

double mse_of(const DispersionParams& p, const Spectrum& target) {
  const Eigen::Map<const Eigen::VectorXd> y(target.emissivity().data(),
                                            static_cast<Eigen::Index>(target.size()));
  return (render_values(p, target.grid()) - y).squaredNorm() / static_cast<double>(target.size());
}

DispersionParams prune(const DispersionParams& p, double threshold) {
  std::vector<std::vector<Band>> bands;
  std::vector<double> eps_r;
  for (const auto& axis : p.axes()) {
    std::vector<Band> kept;
    for (const Band& b : axis.bank().bands()) {
      if (b.rho >= threshold) kept.push_back(b);
    }
    bands.push_back(std::move(kept));
    eps_r.push_back(axis.eps_r());
  }
  return with_bands(p, bands, eps_r);
}

FitResult fit_once(const Spectrum& target, const FitConfig& config, std::size_t restart) {
  const WavenumberGrid& grid = target.grid();
  const DispersionParams init = random_initial_params(grid, config.axes, config.k_init,
                                                      derive_seed(config.seed, restart));
  const ParamBox box = make_fit_box(init, grid, config.box);
  Stage sparse = regress(target, init, box, config.lambda_rho, config.optimizer,
                         config.step_scales);

  AdamConfig refit_cfg = config.optimizer;
  refit_cfg.steps = std::max<std::size_t>(1, config.refit_steps);
  const double pre_prune_mse = mse_of(sparse.params, target);
  double pruned_mass = 0.0;
  for (const auto& axis : sparse.params.axes()) {
    for (const Band& b : axis.bank().bands()) {
      if (b.rho < config.prune_threshold) pruned_mass += b.rho;
    }
  }

  const DispersionParams pruned = prune(sparse.params, config.prune_threshold);
  Stage refit = regress(target, pruned, make_fit_box(pruned, grid, config.box), 0.0, refit_cfg,
                        config.step_scales);
  // Removing a band costs about lambda * rho of squared error plus a positive
  // curvature term. When the refit cannot win the curvature term back, keep
  // every band and refit without the penalty instead; the best-seen iterate
  // then never exceeds the sparse fit's error.
  const double n = static_cast<double>(target.size());
  if (mse_of(refit.params, target) > pre_prune_mse + config.lambda_rho * pruned_mass / n) {
    refit = regress(target, sparse.params, make_fit_box(sparse.params, grid, config.box), 0.0, refit_cfg,
                    config.step_scales);
    pruned_mass = 0.0;
  }
  // Bands the refit drove to rho = 0 contribute exactly nothing.
  const DispersionParams final_params = prune(refit.params, std::numeric_limits<double>::min());

  std::vector<double> trace = std::move(sparse.trace);
  trace.insert(trace.end(), refit.trace.begin(), refit.trace.end());
  const double mse = mse_of(final_params, target);
  return FitResult{final_params,
                   mse,
                   final_params.band_count(),
                   final_params.axis_count(),
                   std::move(trace),
                   make_fit_box(final_params, grid, config.box),
                   pre_prune_mse,
                   pruned_mass};
}

void check_target(const Spectrum& target) {
  for (double e : target.emissivity()) {
    if (!std::isfinite(e)) throw InvalidInput("fit: target emissivity must be finite");
  }
}

}  // namespace

ParamBox make_fit_box(const DispersionParams& shape, const WavenumberGrid& grid,
                      const FitBoxRule& rule) {
  const double span = grid.back() - grid.front();
  const double w_lo = std::max(grid.front() - rule.omega0_margin * span, 1e-6);
  const double w_hi = grid.back() + rule.omega0_margin * span;
  std::vector<std::vector<Band>> lo_bands;
  std::vector<std::vector<Band>> hi_bands;
  std::vector<double> lo_eps;
  std::vector<double> hi_eps;
  for (const auto& axis : shape.axes()) {
    const std::size_t k = axis.bank().size();
    lo_bands.emplace_back(k, Band{w_lo, rule.gamma_min, 0.0});
    hi_bands.emplace_back(k, Band{w_hi, rule.gamma_max, rule.rho_max});
    lo_eps.push_back(1.0);
    hi_eps.push_back(rule.eps_r_max);
  }
  return ParamBox(with_bands(shape, lo_bands, lo_eps), with_bands(shape, hi_bands, hi_eps));
}

DispersionParams random_initial_params(const WavenumberGrid& grid, std::size_t axes,
                                       std::size_t k, std::uint64_t seed) {
  if (axes < 1 || axes > kMaxAxes) throw InvalidInput("fit: axes must be 1 or 2");
  Rng rng(seed);
  std::uniform_real_distribution<double> omega0(grid.front(), grid.back());
  std::uniform_real_distribution<double> gamma(0.01, 0.2);
  std::uniform_real_distribution<double> rho(0.0, 0.1);
  std::uniform_real_distribution<double> eps_r(1.0, 3.0);
  std::vector<AxisParams> out;
  for (std::size_t m = 0; m < axes; ++m) {
    std::vector<Band> bands(k);
    for (Band& b : bands) {
      b.omega0 = omega0(rng);
      b.gamma = gamma(rng);
      b.rho = rho(rng);
    }
    std::sort(bands.begin(), bands.end(),
              [](const Band& a, const Band& b) { return a.omega0 < b.omega0; });
    out.emplace_back(OscillatorBank(std::move(bands)), eps_r(rng));
  }
  return DispersionParams(std::move(out), std::vector<double>(axes, 1.0 / static_cast<double>(axes)));
}

FitResult fit_endmember(const Spectrum& target, const FitConfig& config) {
  config.validate();
  check_target(target);
  std::vector<std::optional<FitResult>> runs(config.restarts);
  std::vector<std::string> failures(config.restarts);
  parallel_for(config.restarts, [&](std::size_t r) {
    try {
      runs[r] = fit_once(target, config, r);
    } catch (const NumericalFailure& e) {
      failures[r] = e.what();
    }
  });
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r] && std::isfinite(runs[r]->mse) && (!best || runs[r]->mse < runs[*best]->mse)) {
      best = r;
    }
  }
  if (!best) throw NumericalFailure("fit: every restart diverged; first: " + failures.front());
  return std::move(*runs[*best]);
}

FitResult select_axis_count(const Spectrum& target, const FitConfig& config) {
  FitConfig one = config;
  one.axes = 1;
  FitConfig two = config;
  two.axes = 2;
  std::optional<FitResult> r1;
  std::optional<FitResult> r2;
  std::string err1;
  try {
    r1 = fit_endmember(target, one);
  } catch (const NumericalFailure& e) {
    err1 = e.what();
  }
  try {
    r2 = fit_endmember(target, two);
  } catch (const NumericalFailure& e) {
    if (!r1) throw NumericalFailure("fit: both axis counts failed: " + err1 + "; " + e.what());
  }
  if (!r2) return std::move(*r1);
  if (!r1) return std::move(*r2);
  // Two axes must win by more than the tie tolerance.
  constexpr double kTie = 1e-9;
  return r2->mse < r1->mse - kTie ? std::move(*r2) : std::move(*r1);
}

ParamBox make_tolerance_box(const DispersionParams& fitted, const ToleranceSet& tol) {
  auto lo_hi = [](double v, double t, double floor_value) {
    const double d = t * std::abs(v);
    return std::pair{std::max(v - d, floor_value), v + d};
  };
  constexpr double kTiny = std::numeric_limits<double>::min();
  std::vector<std::vector<Band>> lo_bands;
  std::vector<std::vector<Band>> hi_bands;
  std::vector<double> lo_eps;
  std::vector<double> hi_eps;
  for (const auto& axis : fitted.axes()) {
    std::vector<Band> lo;
    std::vector<Band> hi;
    for (const Band& b : axis.bank().bands()) {
      const auto [w_lo, w_hi] = lo_hi(b.omega0, tol.omega0, kTiny);
      const auto [g_lo, g_hi] = lo_hi(b.gamma, tol.gamma, kTiny);
      const auto [r_lo, r_hi] = lo_hi(b.rho, tol.rho, 0.0);
      lo.push_back({w_lo, g_lo, r_lo});
      hi.push_back({w_hi, g_hi, r_hi});
    }
    lo_bands.push_back(std::move(lo));
    hi_bands.push_back(std::move(hi));
    const auto [e_lo, e_hi] = lo_hi(axis.eps_r(), tol.eps_r, 1.0);
    lo_eps.push_back(e_lo);
    hi_eps.push_back(e_hi);
  }
  return ParamBox(with_bands(fitted, lo_bands, lo_eps), with_bands(fitted, hi_bands, hi_eps));
}

}  // namespace dunmix
