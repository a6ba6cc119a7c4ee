#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace dunmix {

/// Worker count from DISPERSION_UNMIX_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs fn(0..n-1) across worker threads. Each index must write only its own
/// output slot. If any call throws, the exception of the lowest failing index
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Independent stream seed for (seed, index); order-independent across workers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

using Rng = std::mt19937_64;

}  // namespace dunmix
