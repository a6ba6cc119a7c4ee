#pragma once

// Domain types for the dispersion forward model.
//
// All types validate their invariants on construction and are immutable
// values afterwards; copies are cheap enough for per-pixel ownership.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dunmix {

/// Strictly increasing, positive wavenumbers in cm^-1 (at least two samples).
class WavenumberGrid {
 public:
  explicit WavenumberGrid(std::vector<double> values);

  /// Evenly spaced grid `start, start+step, ...` up to and including `stop`
  /// (within half a step of rounding).
  static WavenumberGrid uniform(double start, double stop, double step);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double front() const noexcept { return values_.front(); }
  double back() const noexcept { return values_.back(); }

  friend bool operator==(const WavenumberGrid&, const WavenumberGrid&) = default;

 private:
  std::vector<double> values_;
};

/// Emissivity samples on a grid. Rendered spectra are bounded to [0, 1];
/// measured spectra may exceed the bound through noise.
class Spectrum {
 public:
  Spectrum(WavenumberGrid grid, std::vector<double> emissivity, bool measured = false);

  const WavenumberGrid& grid() const noexcept { return grid_; }
  std::span<const double> emissivity() const noexcept { return emissivity_; }
  std::size_t size() const noexcept { return emissivity_.size(); }
  double operator[](std::size_t i) const noexcept { return emissivity_[i]; }
  bool measured() const noexcept { return measured_; }

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  WavenumberGrid grid_;
  std::vector<double> emissivity_;
  bool measured_;
};

/// One Lorentz oscillator: resonance (cm^-1), dimensionless damping, band strength.
struct Band {
  double omega0 = 0.0;
  double gamma = 0.0;
  double rho = 0.0;

  friend bool operator==(const Band&, const Band&) = default;
};

/// Bank of K oscillators; K == 0 is a bare dielectric.
class OscillatorBank {
 public:
  OscillatorBank() = default;
  explicit OscillatorBank(std::vector<Band> bands);

  std::span<const Band> bands() const noexcept { return bands_; }
  std::size_t size() const noexcept { return bands_.size(); }
  const Band& operator[](std::size_t i) const noexcept { return bands_[i]; }

  friend bool operator==(const OscillatorBank&, const OscillatorBank&) = default;

 private:
  std::vector<Band> bands_;
};

/// Oscillator bank plus the axis' relative dielectric permeability (>= 1).
class AxisParams {
 public:
  AxisParams(OscillatorBank bank, double eps_r);

  const OscillatorBank& bank() const noexcept { return bank_; }
  double eps_r() const noexcept { return eps_r_; }

  friend bool operator==(const AxisParams&, const AxisParams&) = default;

 private:
  OscillatorBank bank_;
  double eps_r_;
};

inline constexpr std::size_t kMaxAxes = 2;

/// Full material model: one or two optical axes mixed with simplex weights.
class DispersionParams {
 public:
  DispersionParams(std::vector<AxisParams> axes, std::vector<double> alpha);

  /// Single axis with alpha = [1].
  explicit DispersionParams(AxisParams axis);

  std::span<const AxisParams> axes() const noexcept { return axes_; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  std::size_t axis_count() const noexcept { return axes_.size(); }
  std::size_t band_count() const noexcept;

  friend bool operator==(const DispersionParams&, const DispersionParams&) = default;

 private:
  std::vector<AxisParams> axes_;
  std::vector<double> alpha_;
};

/// Elementwise bounds [lower, upper] for a DispersionParams of identical shape.
/// Covers eps_r and every band parameter; axis weights are not boxed (they
/// live on the simplex and are constrained by projection instead).
class ParamBox {
 public:
  ParamBox(DispersionParams lower, DispersionParams upper);

  /// Degenerate box lower == upper == params.
  static ParamBox point(const DispersionParams& params);

  const DispersionParams& lower() const noexcept { return lower_; }
  const DispersionParams& upper() const noexcept { return upper_; }

  /// True when `params` has the box's shape and lies inside it.
  bool contains(const DispersionParams& params) const;

  friend bool operator==(const ParamBox&, const ParamBox&) = default;

 private:
  DispersionParams lower_;
  DispersionParams upper_;
};

/// True when `a` and `b` have the same axis count and per-axis band counts.
bool same_shape(const DispersionParams& a, const DispersionParams& b);

}  // namespace dunmix
