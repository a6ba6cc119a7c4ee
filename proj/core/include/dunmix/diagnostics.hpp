#pragma once

// Rank, conditioning and singular spectrum of the mixing matrix A(Lambda).

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "dunmix/synth.hpp"
#include "dunmix/unmixer.hpp"

namespace dunmix {

struct MatrixReport {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  /// sigma_max / sigma_min; +infinity when rank < cols.
  double condition_number = 0.0;
  /// Descending.
  std::vector<double> singular_values;
  /// Eigenvalues of A^T A (squared singular values), descending.
  std::vector<double> eig_normal;
  /// ||A - U S V^T||_F / ||A||_F of the computed decomposition.
  double reconstruction_error = 0.0;
  /// Samples where the refractive-index floor was active while rendering A
  /// (zero when the report was built from a bare matrix).
  std::size_t floored_samples = 0;
};

/// Default rank tolerance is max(rows, cols) * machine epsilon, relative to sigma_max.
MatrixReport analyze_A(const Eigen::MatrixXd& A, std::optional<double> rank_tolerance = {});

/// Builds A from the library and analyzes it.
MatrixReport analyze_library(const EndmemberLibrary& library,
                             std::optional<double> rank_tolerance = {});

/// Perturbs the library `runs` times (run r uses derive_seed(seed, r)) and
/// analyzes each rebuilt A.
std::vector<MatrixReport> condition_sweep(const EndmemberLibrary& library, PerturbSpec perturb,
                                          std::size_t runs, std::uint64_t seed);

/// CSV `run,rank,condition,min_eig,max_eig`.
void write_sweep_csv(std::ostream& out, const std::vector<MatrixReport>& reports);

}  // namespace dunmix
