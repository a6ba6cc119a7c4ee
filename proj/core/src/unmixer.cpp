#include "dunmix/unmixer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "dunmix/dispersion.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/param_layout.hpp"

namespace dunmix {

EndmemberLibrary::EndmemberLibrary(WavenumberGrid grid, std::vector<Endmember> entries)
    : grid_(std::move(grid)), entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidInput("endmember library needs at least one entry");
  std::set<std::string> names;
  for (const auto& e : entries_) {
    if (!names.insert(e.name).second) throw InvalidInput("duplicate endmember name '" + e.name + "'");
    if (!e.box.contains(e.params)) {
      throw InvalidInput("endmember '" + e.name + "' params lie outside its box");
    }
  }
}

EndmemberLibrary EndmemberLibrary::with_params(std::vector<DispersionParams> params) const {
  if (params.size() != entries_.size()) throw InvalidInput("with_params: entry count mismatch");
  std::vector<Endmember> out = entries_;
  for (std::size_t j = 0; j < out.size(); ++j) out[j].params = std::move(params[j]);
  return EndmemberLibrary(grid_, std::move(out));
}

MixedSpectrum::MixedSpectrum(WavenumberGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InvalidInput("mixed spectrum length must equal grid length");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("mixed spectrum values must be finite");
  }
}

MixedSpectrum::MixedSpectrum(const Spectrum& s)
    : MixedSpectrum(s.grid(), {s.emissivity().begin(), s.emissivity().end()}) {}

void UnmixConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("unmix: p must be in (0, 1]");
  if (!(lambda_p >= 0.0)) throw InvalidInput("unmix: lambda_p must be >= 0");
  if (!(p_epsilon > 0.0)) throw InvalidInput("unmix: p_epsilon must be > 0");
  if (outer_iters < 1) throw InvalidInput("unmix: outer_iters must be >= 1");
  lambda_step.validate();
}

Eigen::MatrixXd build_A(const std::vector<DispersionParams>& params, const WavenumberGrid& grid) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(params.size()));
  for (std::size_t j = 0; j < params.size(); ++j) {
    A.col(static_cast<Eigen::Index>(j)) = render_values(params[j], grid);
  }
  return A;
}

Eigen::MatrixXd build_A(const EndmemberLibrary& library) {
  std::vector<DispersionParams> params;
  for (const auto& e : library.entries()) params.push_back(e.params);
  return build_A(params, library.grid());
}

double unmix_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       std::span<const double> x, double p, double lambda_p, double p_epsilon) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  double penalty = 0.0;
  if (lambda_p > 0.0) {
    for (double xj : x) penalty += std::pow(std::max(xj, 0.0) + p_epsilon, p);
  }
  return (b - A * xv).squaredNorm() + lambda_p * penalty;
}

namespace {

void check_problem(const Eigen::MatrixXd& A, const MixedSpectrum& b) {
  if (A.cols() == 0) throw InvalidInput("abundance solve needs at least one endmember");
  if (A.rows() != static_cast<Eigen::Index>(b.size())) {
    throw InvalidInput("A has " + std::to_string(A.rows()) + " rows but b has " +
                       std::to_string(b.size()) + " samples");
  }
}

}  // namespace

SimplexVector solve_abundances(const Eigen::MatrixXd& A, const MixedSpectrum& b, double p,
                               double lambda_p, const AbundanceSolverConfig& config,
                               double p_epsilon) {
  check_problem(A, b);
  const Eigen::Index e = A.cols();
  if (e == 1) return SimplexVector({1.0});

  // Work on the normal equations: ||b - Ax||^2 = x'Gx - 2c'x + b'b.
  const Eigen::MatrixXd G = A.transpose() * A;
  const Eigen::VectorXd c = A.transpose() * b.vector();
  const double bb = b.vector().squaredNorm();
  const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                     G, Eigen::EigenvaluesOnly)
                                     .eigenvalues()
                                     .maxCoeff();
  const bool penalized = lambda_p > 0.0;

  // The concave penalty is majorized by its tangent, so 1/L of the quadratic
  // part is a valid step for the whole objective.
  const Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), e);
    Eigen::Map<Eigen::VectorXd> g(grad.data(), e);
    const Eigen::VectorXd gx = G * xv;
    g = 2.0 * (gx - c);
    double loss = xv.dot(gx) - 2.0 * c.dot(xv) + bb;
    if (penalized) {
      for (Eigen::Index j = 0; j < e; ++j) {
        const double base = std::max(x[static_cast<std::size_t>(j)], 0.0) + p_epsilon;
        loss += lambda_p * std::pow(base, p);
        g[j] += lambda_p * p * std::pow(base, p - 1.0);
      }
    }
    return loss;
  };

  ProjectedGradientConfig pg;
  pg.step_size = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  pg.max_steps = config.max_steps;
  pg.stop = {config.patience, config.tolerance};
  MinimizeResult r = minimize_projected_gradient(
      objective, std::vector<double>(static_cast<std::size_t>(e), 1.0 / static_cast<double>(e)),
      [](std::span<double> x) { project_simplex_inplace(x); }, pg);
  return SimplexVector(std::move(r.best));
}

SimplexVector fcls(const Eigen::MatrixXd& A, const MixedSpectrum& b,
                   const AbundanceSolverConfig& config) {
  return solve_abundances(A, b, 1.0, 0.0, config);
}

double residual_rms(const Eigen::MatrixXd& A, const MixedSpectrum& b, const SimplexVector& x) {
  check_problem(A, b);
  const Eigen::Map<const Eigen::VectorXd> xv(x.values().data(), static_cast<Eigen::Index>(x.size()));
  return std::sqrt((b.vector() - A * xv).squaredNorm() / static_cast<double>(b.size()));
}

UnmixResult analysis_by_synthesis(const EndmemberLibrary& library, const MixedSpectrum& b,
                                  const UnmixConfig& config) {
  config.validate();
  if (!(b.grid() == library.grid())) throw InvalidInput("mixed spectrum grid differs from library grid");
  const std::size_t e = library.size();
  const WavenumberGrid& grid = library.grid();
  const Eigen::VectorXd bv = b.vector();

  // Joint flat vector over all endmembers; alpha stays pinned.
  std::vector<DispersionParams> params;
  std::vector<std::size_t> offsets;
  std::vector<double> flat;
  FlatBounds bounds;
  for (const auto& entry : library.entries()) {
    offsets.push_back(flat.size());
    params.push_back(entry.params);
    const auto f = flatten(entry.params);
    flat.insert(flat.end(), f.begin(), f.end());
    FlatBounds fb = flatten_box(entry.box, false);
    const ParamLayout layout(entry.params);
    for (std::size_t m = 0; m < layout.axis_count(); ++m) {
      fb.lower[layout.alpha(m)] = fb.upper[layout.alpha(m)] = f[layout.alpha(m)];
    }
    bounds.lower.insert(bounds.lower.end(), fb.lower.begin(), fb.lower.end());
    bounds.upper.insert(bounds.upper.end(), fb.upper.begin(), fb.upper.end());
  }
  offsets.push_back(flat.size());

  const Projection project = [&](std::span<double> x) { project_box(x, bounds.lower, bounds.upper); };
  std::vector<double> scale;
  if (config.box_scaled_steps) {
    for (std::size_t i = 0; i < flat.size(); ++i) scale.push_back(bounds.upper[i] - bounds.lower[i]);
  }
  AdamState adam(flat, scale);
  std::vector<double> grad(flat.size());

  Eigen::MatrixXd A = build_A(params, grid);
  UnmixResult best{SimplexVector::uniform(e), params, 0.0, {}, 0.0};
  bool have_best = false;

  for (std::size_t it = 0; it < config.outer_iters; ++it) {
    // x-step on the current dictionary.
    const SimplexVector x = [&] {
      try {
        return solve_abundances(A, b, config.p, config.lambda_p, config.x_solver, config.p_epsilon);
      } catch (const NumericalFailure& err) {
        throw NumericalFailure(std::string("x-step failed: ") + err.what(),
                               static_cast<std::ptrdiff_t>(it));
      }
    }();
    const double obj = unmix_objective(A, bv, x.values(), config.p, config.lambda_p, config.p_epsilon);
    if (!std::isfinite(obj)) {
      throw NumericalFailure("non-finite unmixing objective", static_cast<std::ptrdiff_t>(it));
    }
    best.loss_trace.push_back(obj);
    if (!have_best || obj < best.objective) {
      best.abundances = x;
      best.refined = params;
      best.objective = obj;
      best.residual_rms = residual_rms(A, b, x);
      have_best = true;
    }
    if (it + 1 == config.outer_iters) break;

    // Lambda-step: Adam on ||b - A(Lambda) x||^2 with box projection.
    for (std::size_t s = 0; s < config.lambda_step.steps; ++s) {
      Eigen::VectorXd residual = -bv;
      std::vector<RenderJacobian> jac;
      jac.reserve(e);
      for (std::size_t j = 0; j < e; ++j) {
        jac.push_back(render_with_gradient(params[j], grid));
        residual += x[j] * jac.back().emissivity;
      }
      for (std::size_t j = 0; j < e; ++j) {
        Eigen::Map<Eigen::VectorXd> g(grad.data() + offsets[j],
                                      static_cast<Eigen::Index>(offsets[j + 1] - offsets[j]));
        g.noalias() = (2.0 * x[j]) * (jac[j].jacobian.transpose() * residual);
      }
      try {
        adam_step(adam, grad, config.lambda_step, project);
      } catch (const NumericalFailure& err) {
        throw NumericalFailure(std::string("Lambda-step failed: ") + err.what(),
                               static_cast<std::ptrdiff_t>(it));
      }
      for (std::size_t j = 0; j < e; ++j) {
        params[j] = unflatten(params[j], std::span<const double>(adam.params).subspan(
                                             offsets[j], offsets[j + 1] - offsets[j]));
      }
    }
    A = build_A(params, grid);
  }
  return best;
}

}  // namespace dunmix
