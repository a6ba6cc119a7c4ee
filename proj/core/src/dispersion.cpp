#include "dunmix/dispersion.hpp"

#include <algorithm>
#include <numeric>

#include "dunmix/param_layout.hpp"

namespace dunmix {

namespace {

ThetaPhi sum_terms(const AxisParams& axis, double omega) {
  ThetaPhi tp{axis.eps_r(), 0.0};
  for (const Band& b : axis.bank().bands()) {
    double theta = 0.0;
    double phi = 0.0;
    kernel::band_terms(b.omega0, b.gamma, b.rho, omega, theta, phi);
    tp.theta += theta;
    tp.phi += phi;
  }
  return tp;
}

// Emissivity of one axis on the grid; optionally counts floored samples.
void axis_emissivity(const AxisParams& axis, const WavenumberGrid& grid, double weight,
                     Eigen::Ref<Eigen::VectorXd> out, std::size_t& floored) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ThetaPhi tp = sum_terms(axis, grid[i]);
    const auto p = kernel::index_from_theta_phi(tp.theta, tp.phi);
    floored += p.floored ? 1 : 0;
    out[static_cast<Eigen::Index>(i)] += weight * std::min(p.emissivity, 1.0);
  }
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

ThetaPhi eval_theta_phi(const AxisParams& axis, double omega) { return sum_terms(axis, omega); }

std::size_t ComplexIndexCurve::floored_count() const {
  return static_cast<std::size_t>(std::count(floored.begin(), floored.end(), std::uint8_t{1}));
}

ComplexIndexCurve refractive_index(const AxisParams& axis, const WavenumberGrid& grid) {
  ComplexIndexCurve c{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()),
                      std::vector<std::uint8_t>(grid.size(), 0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ThetaPhi tp = sum_terms(axis, grid[i]);
    const auto p = kernel::index_from_theta_phi(tp.theta, tp.phi);
    c.n[i] = p.n;
    c.k[i] = p.k;
    c.floored[i] = p.floored ? 1 : 0;
  }
  return c;
}

Spectrum emissivity_single_axis(const AxisParams& axis, const WavenumberGrid& grid) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  std::size_t floored = 0;
  axis_emissivity(axis, grid, 1.0, e, floored);
  return Spectrum(grid, to_std(e));
}

Eigen::VectorXd render_values(const DispersionParams& params, const WavenumberGrid& grid) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  std::size_t floored = 0;
  for (std::size_t m = 0; m < params.axis_count(); ++m) {
    axis_emissivity(params.axes()[m], grid, params.alpha()[m], e, floored);
  }
  return e.cwiseMin(1.0);
}

Spectrum render(const DispersionParams& params, const WavenumberGrid& grid) {
  return Spectrum(grid, to_std(render_values(params, grid)));
}

RenderJacobian render_with_gradient(const DispersionParams& params, const WavenumberGrid& grid) {
  using Band3 = Dual<3>;
  using Pipe2 = Dual<2>;

  const ParamLayout layout(params);
  const auto rows = static_cast<Eigen::Index>(grid.size());
  RenderJacobian out{Eigen::VectorXd::Zero(rows),
                     Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(layout.size())), 0};

  std::vector<Band3> theta_k;
  std::vector<Band3> phi_k;
  for (std::size_t m = 0; m < params.axis_count(); ++m) {
    const AxisParams& axis = params.axes()[m];
    const double alpha = params.alpha()[m];
    const std::size_t bands = axis.bank().size();
    theta_k.resize(bands);
    phi_k.resize(bands);

    for (Eigen::Index i = 0; i < rows; ++i) {
      const double omega = grid[static_cast<std::size_t>(i)];

      // Band terms carry tangents w.r.t. their own (omega0, gamma, rho).
      double theta = axis.eps_r();
      double phi = 0.0;
      for (std::size_t k = 0; k < bands; ++k) {
        const Band& b = axis.bank()[k];
        kernel::band_terms(Band3::variable(b.omega0, 0), Band3::variable(b.gamma, 1),
                           Band3::variable(b.rho, 2), omega, theta_k[k], phi_k[k]);
        theta += theta_k[k].v;
        phi += phi_k[k].v;
      }

      // Pipeline tangents w.r.t. (theta, phi); chained into band tangents below.
      const auto p = kernel::index_from_theta_phi(Pipe2::variable(theta, 0),
                                                  Pipe2::variable(phi, 1));
      out.floored_samples += p.floored ? 1 : 0;
      const double eps = std::min(p.emissivity.v, 1.0);
      const double d_theta = p.emissivity.d[0];
      const double d_phi = p.emissivity.d[1];

      out.emissivity[i] += alpha * eps;
      out.jacobian(i, static_cast<Eigen::Index>(layout.eps_r(m))) = alpha * d_theta;
      for (std::size_t k = 0; k < bands; ++k) {
        for (std::size_t f = 0; f < 3; ++f) {
          const auto col = static_cast<Eigen::Index>(layout.band(m, k, static_cast<BandField>(f)));
          out.jacobian(i, col) = alpha * (d_theta * theta_k[k].d[f] + d_phi * phi_k[k].d[f]);
        }
      }
      out.jacobian(i, static_cast<Eigen::Index>(layout.alpha(m))) = eps;
    }
  }
  out.emissivity = out.emissivity.cwiseMin(1.0);
  return out;
}

}  // namespace dunmix
