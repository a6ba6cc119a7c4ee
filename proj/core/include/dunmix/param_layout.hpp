#pragma once

// Flat parameter vectors for DispersionParams.
//
// Order: for each axis m, eps_r followed by (omega0, gamma, rho) for every
// band of that axis; then alpha_0 .. alpha_{M-1}. Jacobian columns from
// render_with_gradient() use the same order.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dunmix/types.hpp"

namespace dunmix {

enum class BandField : std::size_t { omega0 = 0, gamma = 1, rho = 2 };

class ParamLayout {
 public:
  explicit ParamLayout(const DispersionParams& shape);

  std::size_t size() const noexcept { return size_; }
  std::size_t axis_count() const noexcept { return axis_offsets_.size(); }
  std::size_t band_count(std::size_t axis) const noexcept { return band_counts_[axis]; }

  std::size_t eps_r(std::size_t axis) const noexcept { return axis_offsets_[axis]; }
  std::size_t band(std::size_t axis, std::size_t k, BandField f) const noexcept {
    return axis_offsets_[axis] + 1 + 3 * k + static_cast<std::size_t>(f);
  }
  std::size_t alpha(std::size_t axis) const noexcept { return alpha_offset_ + axis; }
  std::size_t alpha_offset() const noexcept { return alpha_offset_; }

  /// Human-readable names, e.g. "axis1.band4.gamma", "alpha0".
  std::vector<std::string> names() const;

 private:
  std::vector<std::size_t> axis_offsets_;
  std::vector<std::size_t> band_counts_;
  std::size_t alpha_offset_ = 0;
  std::size_t size_ = 0;
};

std::vector<double> flatten(const DispersionParams& params);

/// Rebuilds params of `shape`'s structure from a flat vector. Throws
/// InvalidInput if the values violate a parameter invariant.
DispersionParams unflatten(const DispersionParams& shape, std::span<const double> flat);

struct FlatBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Flat bounds of a box. With `alpha_free`, alpha entries get [0, 1] (the
/// simplex projection does the rest); otherwise they are pinned to the box's
/// own alpha values.
FlatBounds flatten_box(const ParamBox& box, bool alpha_free);

}  // namespace dunmix
