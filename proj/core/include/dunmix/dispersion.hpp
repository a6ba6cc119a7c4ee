#pragma once

// Lorentz-oscillator dispersion model: band parameters -> complex refractive
// index -> normal-incidence emissivity, plus its exact parameter Jacobian.

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dunmix/dual.hpp"
#include "dunmix/types.hpp"

namespace dunmix {

/// Lower bound on the real refractive index; keeps k = phi / n finite.
inline constexpr double kIndexFloor = 1e-8;

struct ThetaPhi {
  double theta = 0.0;
  double phi = 0.0;
};

/// Real and imaginary parts of the complex dielectric function of one axis
/// at wavenumber `omega` (theta = n^2 - k^2, phi = n k).
ThetaPhi eval_theta_phi(const AxisParams& axis, double omega);

struct ComplexIndexCurve {
  WavenumberGrid grid;
  std::vector<double> n;
  std::vector<double> k;
  /// 1 where the index floor replaced (theta + b) / 2.
  std::vector<std::uint8_t> floored;

  std::size_t floored_count() const;
};

ComplexIndexCurve refractive_index(const AxisParams& axis, const WavenumberGrid& grid);

Spectrum emissivity_single_axis(const AxisParams& axis, const WavenumberGrid& grid);

/// Axis-weighted emissivity sum_m alpha_m * eps(axis_m).
Spectrum render(const DispersionParams& params, const WavenumberGrid& grid);

/// Same as render() but returns the plain emissivity vector (no Spectrum validation).
Eigen::VectorXd render_values(const DispersionParams& params, const WavenumberGrid& grid);

struct RenderJacobian {
  Eigen::VectorXd emissivity;
  /// One row per grid sample, one column per flattened parameter
  /// (see param_layout.hpp for the column order).
  Eigen::MatrixXd jacobian;
  std::size_t floored_samples = 0;
};

/// Emissivity and its exact Jacobian by forward-mode dual numbers.
RenderJacobian render_with_gradient(const DispersionParams& params, const WavenumberGrid& grid);

namespace kernel {

/// Contribution of one oscillator to (theta, phi) at wavenumber `omega`.
template <class T>
inline void band_terms(const T& omega0, const T& gamma, const T& rho, double omega, T& theta,
                       T& phi) {
  constexpr double pi = std::numbers::pi;
  const double wsq = omega * omega;
  const T w0sq = omega0 * omega0;
  const T diff = w0sq - wsq;
  const T denom = diff * diff + gamma * gamma * w0sq * wsq;
  const T common = rho * w0sq / denom;
  theta = (4.0 * pi) * common * diff;
  phi = (2.0 * pi * omega) * common * gamma * omega0;
}

template <class T>
struct IndexPoint {
  T n;
  T k;
  T emissivity;
  bool floored = false;
};

/// (theta, phi) -> (n, k, emissivity). For theta < 0 the half-sum (theta + b) / 2
/// is evaluated as 2 phi^2 / (b - theta) to avoid cancellation.
template <class T>
inline IndexPoint<T> index_from_theta_phi(const T& theta, const T& phi) {
  using std::sqrt;
  const T b = sqrt(theta * theta + 4.0 * phi * phi);
  T nsq = value_of(theta) >= 0.0 ? (theta + b) * 0.5 : 2.0 * phi * phi / (b - theta);
  bool floored = false;
  if (!(value_of(nsq) >= kIndexFloor * kIndexFloor)) {
    nsq = T(kIndexFloor * kIndexFloor);
    floored = true;
  }
  const T n = sqrt(nsq);
  const T k = phi / n;
  const T np1 = n + 1.0;
  // 1 - |(n - ik - 1) / (n - ik + 1)|^2 simplifies to 4n / ((n+1)^2 + k^2).
  T emissivity = 4.0 * n / (np1 * np1 + k * k);
  return {n, k, emissivity, floored};
}

}  // namespace kernel
}  // namespace dunmix
