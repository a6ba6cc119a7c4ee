#include "dunmix/param_layout.hpp"

#include <cmath>

#include "dunmix/errors.hpp"

namespace dunmix {

ParamLayout::ParamLayout(const DispersionParams& shape) {
  std::size_t offset = 0;
  for (const auto& axis : shape.axes()) {
    axis_offsets_.push_back(offset);
    band_counts_.push_back(axis.bank().size());
    offset += 1 + 3 * axis.bank().size();
  }
  alpha_offset_ = offset;
  size_ = offset + shape.axis_count();
}

std::vector<std::string> ParamLayout::names() const {
  static constexpr const char* kField[] = {"omega0", "gamma", "rho"};
  std::vector<std::string> out(size_);
  for (std::size_t m = 0; m < axis_count(); ++m) {
    const std::string ax = "axis" + std::to_string(m);
    out[eps_r(m)] = ax + ".eps_r";
    for (std::size_t k = 0; k < band_counts_[m]; ++k) {
      for (std::size_t f = 0; f < 3; ++f) {
        out[band(m, k, static_cast<BandField>(f))] =
            ax + ".band" + std::to_string(k) + "." + kField[f];
      }
    }
    out[alpha(m)] = "alpha" + std::to_string(m);
  }
  return out;
}

std::vector<double> flatten(const DispersionParams& params) {
  const ParamLayout layout(params);
  std::vector<double> flat(layout.size());
  for (std::size_t m = 0; m < params.axis_count(); ++m) {
    const auto& axis = params.axes()[m];
    flat[layout.eps_r(m)] = axis.eps_r();
    for (std::size_t k = 0; k < axis.bank().size(); ++k) {
      const Band& b = axis.bank()[k];
      flat[layout.band(m, k, BandField::omega0)] = b.omega0;
      flat[layout.band(m, k, BandField::gamma)] = b.gamma;
      flat[layout.band(m, k, BandField::rho)] = b.rho;
    }
    flat[layout.alpha(m)] = params.alpha()[m];
  }
  return flat;
}

DispersionParams unflatten(const DispersionParams& shape, std::span<const double> flat) {
  const ParamLayout layout(shape);
  if (flat.size() != layout.size()) {
    throw InvalidInput("flat parameter vector has length " + std::to_string(flat.size()) +
                       ", expected " + std::to_string(layout.size()));
  }
  std::vector<AxisParams> axes;
  std::vector<double> alpha;
  for (std::size_t m = 0; m < shape.axis_count(); ++m) {
    std::vector<Band> bands(layout.band_count(m));
    for (std::size_t k = 0; k < bands.size(); ++k) {
      bands[k] = {flat[layout.band(m, k, BandField::omega0)],
                  flat[layout.band(m, k, BandField::gamma)],
                  flat[layout.band(m, k, BandField::rho)]};
    }
    axes.emplace_back(OscillatorBank(std::move(bands)), flat[layout.eps_r(m)]);
    alpha.push_back(flat[layout.alpha(m)]);
  }
  // Absorb rounding from projections; genuine violations still throw.
  double sum = 0.0;
  for (double a : alpha) sum += a;
  if (std::abs(sum - 1.0) < 1e-9 && sum > 0.0) {
    for (double& a : alpha) a /= sum;
  }
  return DispersionParams(std::move(axes), std::move(alpha));
}

FlatBounds flatten_box(const ParamBox& box, bool alpha_free) {
  FlatBounds out{flatten(box.lower()), flatten(box.upper())};
  const ParamLayout layout(box.lower());
  for (std::size_t m = 0; m < layout.axis_count(); ++m) {
    const std::size_t i = layout.alpha(m);
    if (alpha_free) {
      out.lower[i] = 0.0;
      out.upper[i] = 1.0;
    } else {
      out.upper[i] = out.lower[i];
    }
  }
  return out;
}

}  // namespace dunmix
