#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dunmix/types.hpp"

namespace dunmix {

struct KMeansResult {
  std::vector<Spectrum> centroids;
  std::vector<std::size_t> assignment;
  /// Within-cluster sum of squares after seeding and after every Lloyd iteration.
  std::vector<double> wcss_trace;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding; stops at an assignment fixpoint
/// or after `max_iters`. Spectra must share one grid.
KMeansResult kmeans(const std::vector<Spectrum>& spectra, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 300);

/// Cluster centroids as measured spectra, ready for endmember fitting.
std::vector<Spectrum> kmeans_exemplars(const std::vector<Spectrum>& spectra, std::size_t k,
                                       std::uint64_t seed);

}  // namespace dunmix
