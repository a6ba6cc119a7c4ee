#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dunmix/diagnostics.hpp"
#include "dunmix/fixtures.hpp"
#include "oracles.hpp"

using namespace dunmix;

namespace {

const WavenumberGrid kGrid = WavenumberGrid::uniform(200.0, 2000.0, 4.0);

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("identity matrix") {
    const MatrixReport r = analyze_A(Eigen::MatrixXd::Identity(5, 3));
    CHECK(r.rank == 3);
    CHECK(r.condition_number == doctest::Approx(1.0).epsilon(1e-15));
    for (double s : r.singular_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.reconstruction_error < 1e-15);
  }

  TEST_CASE("duplicated column is rank deficient with infinite condition") {
    Eigen::MatrixXd A(4, 3);
    A << 1, 2, 1, 0, 1, 0, 3, 1, 3, 2, 5, 2;
    const MatrixReport r = analyze_A(A);
    CHECK(r.rank == 2);
    CHECK(std::isinf(r.condition_number));
  }

  TEST_CASE("fixture library against an independent Jacobi SVD") {
    const EndmemberLibrary lib = fixture_library(kGrid);
    const MatrixReport r = analyze_library(lib);
    const std::vector<double> ref = oracle::jacobi_singular_values(build_A(lib));
    REQUIRE(r.singular_values.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(r.singular_values[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      CHECK(r.eig_normal[i] == doctest::Approx(ref[i] * ref[i]).epsilon(1e-9));
    }
    CHECK(r.rank == 3);
    CHECK(r.condition_number == doctest::Approx(ref.front() / ref.back()).epsilon(1e-11));
    CHECK(r.reconstruction_error < 1e-10);
    CHECK(r.rows == kGrid.size());
    CHECK(r.cols == 3);
  }

  TEST_CASE("rank is invariant under row permutation and column sign flips") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index rows = 6 + static_cast<Eigen::Index>(rng() % 10);
      const Eigen::Index cols = 1 + static_cast<Eigen::Index>(rng() % 5);
      const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(cols));
      Eigen::MatrixXd L(rows, rank), R(rank, cols);
      for (Eigen::Index i = 0; i < L.size(); ++i) L.data()[i] = normal(rng);
      for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = normal(rng);
      const Eigen::MatrixXd A = L * R;
      Eigen::PermutationMatrix<Eigen::Dynamic> perm(rows);
      perm.setIdentity();
      std::shuffle(perm.indices().data(), perm.indices().data() + rows, rng);
      Eigen::VectorXd signs(cols);
      for (Eigen::Index j = 0; j < cols; ++j) signs[j] = rng() % 2 ? 1.0 : -1.0;
      const Eigen::MatrixXd B = perm * A * signs.asDiagonal();
      const MatrixReport ra = analyze_A(A);
      const MatrixReport rb = analyze_A(B);
      CHECK(ra.rank == static_cast<std::size_t>(rank));
      CHECK(rb.rank == ra.rank);
      for (std::size_t i = 0; i < ra.singular_values.size(); ++i) {
        CHECK(rb.singular_values[i] == doctest::Approx(ra.singular_values[i]).epsilon(1e-9));
        CHECK(ra.eig_normal[i] == doctest::Approx(ra.singular_values[i] * ra.singular_values[i]).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("zero perturbation sweep repeats the base report") {
    const EndmemberLibrary lib = fixture_library(kGrid);
    const auto runs = condition_sweep(lib, PerturbSpec{}, 4, 1);
    const MatrixReport base = analyze_library(lib);
    for (const auto& r : runs) {
      CHECK(r.singular_values == base.singular_values);
      CHECK(r.condition_number == base.condition_number);
    }
  }

  TEST_CASE("within-box sweep keeps the fixture library full rank and emits CSV") {
    const EndmemberLibrary lib = fixture_library(kGrid);
    PerturbSpec spec;
    spec.within_box = true;
    const auto runs = condition_sweep(lib, spec, 20, 3);
    REQUIRE(runs.size() == 20);
    for (const auto& r : runs) {
      CHECK(r.rank == 3);
      CHECK(std::isfinite(r.condition_number));
    }
    std::ostringstream csv;
    write_sweep_csv(csv, runs);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "run,rank,condition,min_eig,max_eig");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 20);
  }

  TEST_CASE("infinite condition prints as inf") {
    Eigen::MatrixXd A(3, 2);
    A << 1, 1, 2, 2, 3, 3;
    std::ostringstream csv;
    write_sweep_csv(csv, {analyze_A(A)});
    CHECK(csv.str().find(",inf,") != std::string::npos);
  }
}
