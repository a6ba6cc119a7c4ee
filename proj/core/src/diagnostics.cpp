#include "dunmix/diagnostics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "dunmix/dispersion.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/parallel.hpp"

namespace dunmix {

MatrixReport analyze_A(const Eigen::MatrixXd& A, std::optional<double> rank_tolerance) {
  if (A.size() == 0) throw InvalidInput("analyze_A: matrix is empty");
  if (!A.allFinite()) throw InvalidInput("analyze_A: matrix has non-finite entries");

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();

  MatrixReport r;
  r.rows = static_cast<std::size_t>(A.rows());
  r.cols = static_cast<std::size_t>(A.cols());
  r.singular_values.assign(s.data(), s.data() + s.size());
  for (double v : r.singular_values) r.eig_normal.push_back(v * v);

  const double smax = r.singular_values.front();
  const double tol = rank_tolerance.value_or(static_cast<double>(std::max(r.rows, r.cols)) *
                                             std::numeric_limits<double>::epsilon());
  r.rank = static_cast<std::size_t>(
      std::count_if(r.singular_values.begin(), r.singular_values.end(),
                    [&](double v) { return v > tol * smax; }));
  r.condition_number = r.rank < r.cols ? std::numeric_limits<double>::infinity()
                                       : smax / r.singular_values.back();

  const Eigen::MatrixXd recon = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  const double norm = A.norm();
  r.reconstruction_error = norm > 0.0 ? (A - recon).norm() / norm : (A - recon).norm();
  return r;
}

MatrixReport analyze_library(const EndmemberLibrary& library, std::optional<double> rank_tolerance) {
  MatrixReport r = analyze_A(build_A(library), rank_tolerance);
  for (const Endmember& e : library.entries()) {
    for (const AxisParams& axis : e.params.axes()) {
      r.floored_samples += refractive_index(axis, library.grid()).floored_count();
    }
  }
  return r;
}

std::vector<MatrixReport> condition_sweep(const EndmemberLibrary& library, PerturbSpec perturb,
                                          std::size_t runs, std::uint64_t seed) {
  if (runs == 0) throw InvalidInput("condition_sweep: runs must be >= 1");
  perturb.validate();
  std::vector<std::optional<MatrixReport>> slots(runs);
  parallel_for(runs, [&](std::size_t run) {
    PerturbSpec spec = perturb;
    spec.seed = derive_seed(seed, run);
    slots[run] = analyze_A(build_A(perturb_library(library, spec), library.grid()));
  });
  std::vector<MatrixReport> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<MatrixReport>& reports) {
  out << "run,rank,condition,min_eig,max_eig\n" << std::setprecision(17);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MatrixReport& r = reports[i];
    out << i << ',' << r.rank << ',';
    if (std::isinf(r.condition_number)) {
      out << "inf";
    } else {
      out << r.condition_number;
    }
    out << ',' << r.eig_normal.back() << ',' << r.eig_normal.front() << '\n';
  }
}

}  // namespace dunmix
