#include "dunmix/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "dunmix/errors.hpp"

namespace dunmix {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

}  // namespace

WavenumberGrid::WavenumberGrid(std::vector<double> values) : values_(std::move(values)) {
  require(values_.size() >= 2, "wavenumber grid needs at least 2 samples");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require(std::isfinite(values_[i]) && values_[i] > 0.0,
            "wavenumber grid values must be finite and > 0 (index " + std::to_string(i) + ")");
    if (i > 0) {
      require(values_[i] > values_[i - 1],
              "wavenumber grid must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

WavenumberGrid WavenumberGrid::uniform(double start, double stop, double step) {
  require(step > 0.0 && std::isfinite(step), "grid step must be > 0");
  require(stop > start, "grid stop must exceed start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + step * static_cast<double>(i);
  return WavenumberGrid(std::move(v));
}

Spectrum::Spectrum(WavenumberGrid grid, std::vector<double> emissivity, bool measured)
    : grid_(std::move(grid)), emissivity_(std::move(emissivity)), measured_(measured) {
  require(emissivity_.size() == grid_.size(), "emissivity length must equal grid length");
  for (std::size_t i = 0; i < emissivity_.size(); ++i) {
    const double e = emissivity_[i];
    require(std::isfinite(e), "emissivity must be finite (index " + std::to_string(i) + ")");
    if (!measured_) {
      require(e >= 0.0 && e <= 1.0,
              "rendered emissivity outside [0,1] (index " + std::to_string(i) + ")");
    }
  }
}

OscillatorBank::OscillatorBank(std::vector<Band> bands) : bands_(std::move(bands)) {
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    const Band& b = bands_[i];
    const std::string at = " (band " + std::to_string(i) + ")";
    require(std::isfinite(b.omega0) && b.omega0 > 0.0, "omega0 must be > 0" + at);
    require(std::isfinite(b.gamma) && b.gamma > 0.0, "gamma must be > 0" + at);
    require(std::isfinite(b.rho) && b.rho >= 0.0, "rho must be >= 0" + at);
  }
}

AxisParams::AxisParams(OscillatorBank bank, double eps_r) : bank_(std::move(bank)), eps_r_(eps_r) {
  require(std::isfinite(eps_r_) && eps_r_ >= 1.0, "eps_r must be >= 1");
}

DispersionParams::DispersionParams(std::vector<AxisParams> axes, std::vector<double> alpha)
    : axes_(std::move(axes)), alpha_(std::move(alpha)) {
  require(!axes_.empty() && axes_.size() <= kMaxAxes, "axis count must be 1 or 2");
  require(alpha_.size() == axes_.size(), "alpha length must equal axis count");
  double sum = 0.0;
  for (double a : alpha_) {
    require(std::isfinite(a) && a >= 0.0, "alpha entries must be >= 0");
    sum += a;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "alpha must sum to 1");
}

DispersionParams::DispersionParams(AxisParams axis)
    : DispersionParams(std::vector<AxisParams>{std::move(axis)}, std::vector<double>{1.0}) {}

std::size_t DispersionParams::band_count() const noexcept {
  std::size_t n = 0;
  for (const auto& a : axes_) n += a.bank().size();
  return n;
}

bool same_shape(const DispersionParams& a, const DispersionParams& b) {
  if (a.axis_count() != b.axis_count()) return false;
  for (std::size_t m = 0; m < a.axis_count(); ++m) {
    if (a.axes()[m].bank().size() != b.axes()[m].bank().size()) return false;
  }
  return true;
}

ParamBox::ParamBox(DispersionParams lower, DispersionParams upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(same_shape(lower_, upper_), "param box bounds must have identical shape");
  for (std::size_t m = 0; m < lower_.axis_count(); ++m) {
    const auto& lo = lower_.axes()[m];
    const auto& hi = upper_.axes()[m];
    require(lo.eps_r() <= hi.eps_r(), "param box: eps_r lower > upper (axis " + std::to_string(m) + ")");
    for (std::size_t k = 0; k < lo.bank().size(); ++k) {
      const Band& l = lo.bank()[k];
      const Band& u = hi.bank()[k];
      std::ostringstream at;
      at << " (axis " << m << ", band " << k << ")";
      require(l.omega0 <= u.omega0, "param box: omega0 lower > upper" + at.str());
      require(l.gamma <= u.gamma, "param box: gamma lower > upper" + at.str());
      require(l.rho <= u.rho, "param box: rho lower > upper" + at.str());
    }
  }
}

ParamBox ParamBox::point(const DispersionParams& params) { return ParamBox(params, params); }

bool ParamBox::contains(const DispersionParams& p) const {
  if (!same_shape(p, lower_)) return false;
  for (std::size_t m = 0; m < p.axis_count(); ++m) {
    const auto& ax = p.axes()[m];
    const auto& lo = lower_.axes()[m];
    const auto& hi = upper_.axes()[m];
    if (ax.eps_r() < lo.eps_r() || ax.eps_r() > hi.eps_r()) return false;
    for (std::size_t k = 0; k < ax.bank().size(); ++k) {
      const Band& b = ax.bank()[k];
      const Band& l = lo.bank()[k];
      const Band& u = hi.bank()[k];
      if (b.omega0 < l.omega0 || b.omega0 > u.omega0) return false;
      if (b.gamma < l.gamma || b.gamma > u.gamma) return false;
      if (b.rho < l.rho || b.rho > u.rho) return false;
    }
  }
  return true;
}

}  // namespace dunmix
