#include "dunmix/kmeans.hpp"

#include <Eigen/Core>
#include <limits>
#include <random>

#include "dunmix/errors.hpp"
#include "dunmix/parallel.hpp"

namespace dunmix {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double wcss(const Matrix& x, const Matrix& c, const std::vector<std::size_t>& assign) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    s += (x.row(i) - c.row(static_cast<Eigen::Index>(assign[static_cast<std::size_t>(i)]))).squaredNorm();
  }
  return s;
}

// Nearest centroid; ties go to the lowest index.
std::size_t nearest(const Matrix& c, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    const double d = (row - c.row(j)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<Spectrum>& spectra, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
  if (k == 0) throw InvalidInput("kmeans: k must be >= 1");
  if (spectra.size() < k) {
    throw InvalidInput("kmeans: need at least k=" + std::to_string(k) + " spectra, got " +
                       std::to_string(spectra.size()));
  }
  const WavenumberGrid& grid = spectra.front().grid();
  const auto n = static_cast<Eigen::Index>(spectra.size());
  const auto dim = static_cast<Eigen::Index>(grid.size());
  Matrix x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Spectrum& s = spectra[static_cast<std::size_t>(i)];
    if (!(s.grid() == grid)) throw InvalidInput("kmeans: spectra must share one grid");
    for (Eigen::Index d = 0; d < dim; ++d) x(i, d) = s[static_cast<std::size_t>(d)];
  }

  // k-means++ seeding.
  Rng rng(seed);
  Matrix c(static_cast<Eigen::Index>(k), dim);
  c.row(0) = x.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x.row(i) - c.row(0)).squaredNorm();
  for (std::size_t j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        u -= d2[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] <= 0.0 && pick > 0) --pick;
    }
    c.row(static_cast<Eigen::Index>(j)) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(i) - c.row(static_cast<Eigen::Index>(j))).squaredNorm());
    }
  }

  KMeansResult r;
  r.assignment.assign(spectra.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) r.assignment[static_cast<std::size_t>(i)] = nearest(c, x.row(i));
  r.wcss_trace.push_back(wcss(x, c, r.assignment));

  for (std::size_t it = 0; it < max_iters; ++it) {
    // Update step; empty clusters keep their previous centroid.
    Matrix sums = Matrix::Zero(c.rows(), dim);
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t a = r.assignment[static_cast<std::size_t>(i)];
      sums.row(static_cast<Eigen::Index>(a)) += x.row(i);
      ++counts[a];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        c.row(static_cast<Eigen::Index>(j)) =
            sums.row(static_cast<Eigen::Index>(j)) / static_cast<double>(counts[j]);
      }
    }
    ++r.iterations;

    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t a = nearest(c, x.row(i));
      if (a != r.assignment[static_cast<std::size_t>(i)]) {
        r.assignment[static_cast<std::size_t>(i)] = a;
        changed = true;
      }
    }
    r.wcss_trace.push_back(wcss(x, c, r.assignment));
    if (!changed) break;
  }

  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    r.centroids.emplace_back(grid, std::vector<double>(c.row(j).begin(), c.row(j).end()), true);
  }
  return r;
}

std::vector<Spectrum> kmeans_exemplars(const std::vector<Spectrum>& spectra, std::size_t k,
                                       std::uint64_t seed) {
  return kmeans(spectra, k, seed).centroids;
}

}  // namespace dunmix
