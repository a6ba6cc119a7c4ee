#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include "doctest.h"
#include "dunmix/dispersion.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/fixtures.hpp"
#include "dunmix/kmeans.hpp"
#include "dunmix/synth.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dunmix;

namespace {

const WavenumberGrid kGrid = WavenumberGrid::uniform(200.0, 2000.0, 4.0);

Spectrum measured(const WavenumberGrid& g, std::vector<double> v) { return Spectrum(g, std::move(v), true); }

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("zero-width perturbation is the identity") {
    const DispersionParams p = load_fixture_params("biotite");
    PerturbSpec spec;
    spec.seed = 3;
    CHECK(perturb_params(p, spec) == p);
  }

  TEST_CASE("deterministic perturbation arithmetic") {
    const DispersionParams p(gen::single_band(2.356, 1161.0, 0.1, 0.67));
    PerturbSpec spec;
    spec.omega0_shift = {100.0, 100.0};
    spec.gamma_scale = {1.2, 1.2};
    spec.rho_scale = {1.2, 1.2};
    const Band b = perturb_params(p, spec).axes()[0].bank()[0];
    CHECK(b.omega0 == doctest::Approx(1261.0).epsilon(1e-15));
    CHECK(b.gamma == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(b.rho == doctest::Approx(0.804).epsilon(1e-15));
  }

  TEST_CASE("seeded perturbations are reproducible and stay valid") {
    const DispersionParams p = load_fixture_params("hematite");
    PerturbSpec spec;
    spec.omega0_shift = {-300.0, 300.0};
    spec.gamma_scale = {0.5, 1.5};
    spec.rho_scale = {0.5, 1.5};
    spec.eps_scale = {0.5, 1.5};
    spec.seed = 123;
    const DispersionParams a = perturb_params(p, spec);
    CHECK(a == perturb_params(p, spec));
    spec.seed = 124;
    CHECK_FALSE(a == perturb_params(p, spec));
    for (const auto& axis : a.axes()) {
      CHECK(axis.eps_r() >= 1.0);
      for (const Band& b : axis.bank().bands()) CHECK(b.omega0 > 0.0);
    }
  }

  TEST_CASE("perturbation spec validation") {
    PerturbSpec spec;
    spec.gamma_scale = {0.0, 1.0};
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    spec = {};
    spec.rho_scale = {2.0, 1.0};
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
  }

  TEST_CASE("within-box perturbation stays inside every box") {
    const EndmemberLibrary lib = fixture_library(kGrid);
    PerturbSpec spec;
    spec.within_box = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      spec.seed = seed;
      const auto perturbed = perturb_library(lib, spec);
      for (std::size_t j = 0; j < lib.size(); ++j) CHECK(lib[j].box.contains(perturbed[j]));
    }
  }

  TEST_CASE("noiseless pure mixture equals the endmember column") {
    const EndmemberLibrary lib = fixture_library(kGrid);
    const SynthSample s = synth_mixture(lib, SimplexVector({1.0, 0.0, 0.0}), PerturbSpec{}, NoiseSpec{});
    const Eigen::VectorXd col = build_A(lib).col(0);
    for (std::size_t i = 0; i < kGrid.size(); ++i) CHECK(s.mixed.values()[i] == col[static_cast<Eigen::Index>(i)]);
  }

  TEST_CASE("two dielectrics mix linearly") {
    const DispersionParams a(gen::dielectric(4.0));
    const DispersionParams b(gen::dielectric(1.0));
    const EndmemberLibrary lib(kGrid, {{"a", a, ParamBox::point(a)}, {"b", b, ParamBox::point(b)}});
    const SynthSample s = synth_mixture(lib, SimplexVector({0.5, 0.5}), PerturbSpec{}, NoiseSpec{});
    for (double v : s.mixed.values()) CHECK(v == doctest::Approx(17.0 / 18.0).epsilon(1e-15));
  }

  TEST_CASE("ground truth replays the noiseless mixture bit-exactly") {
    const EndmemberLibrary lib = fixture_library(kGrid);
    PerturbSpec ps;
    ps.omega0_shift = {-5.0, 5.0};
    ps.rho_scale = {0.9, 1.1};
    ps.seed = 8;
    const SynthSample noisy = synth_mixture(lib, SimplexVector({0.3, 0.3, 0.4}), ps, NoiseSpec{1e-3, 330.0, 4});
    const SynthSample clean = synth_mixture(lib, SimplexVector({0.3, 0.3, 0.4}), ps, NoiseSpec{0.0, 330.0, 4});
    const Eigen::VectorXd replay = replay_noiseless(noisy.truth, kGrid);
    for (std::size_t i = 0; i < kGrid.size(); ++i) CHECK(replay[static_cast<Eigen::Index>(i)] == clean.mixed.values()[i]);
  }

  TEST_CASE("Planck shape") {
    for (double w : {300.0, 800.0, 1500.0}) CHECK(planck(w, 340.0) > planck(w, 330.0));
    CHECK_THROWS_AS(planck(0.0, 300.0), InvalidInput);
    // Dense argmax against the Wien constant.
    const WavenumberGrid dense = WavenumberGrid::uniform(100.0, 2000.0, 0.01);
    const auto b = planck_normalized(dense, 330.0);
    const std::size_t arg = static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
    CHECK(std::abs(dense[arg] - 647.0) <= 2.0);
    CHECK(planck_peak_wavenumber(330.0) == doctest::Approx(dense[arg]).epsilon(1e-4));
    // B(2w*) / B(w*) = 8 (e^x - 1) / (e^(2x) - 1) = 8 / (e^x + 1) at x = c2 w* / T.
    const double wp = planck_peak_wavenumber(330.0);
    const oracle::Real x = oracle::Real(kSecondRadiationConstant) * oracle::Real(wp) / oracle::Real(330.0);
    const double ratio = static_cast<double>(oracle::Real(8) / (exp(x) + 1));
    CHECK(planck(2.0 * wp, 330.0) / planck(wp, 330.0) == doctest::Approx(ratio).epsilon(1e-13));
  }

  TEST_CASE("zero noise is the identity and flags the spectrum as measured") {
    const Spectrum s = render(load_fixture_params("biotite"), kGrid);
    const Spectrum n = emissivity_noise(s, NoiseSpec{0.0, 330.0, 1});
    CHECK(n.measured());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(n[i] == s[i]);
  }

  TEST_CASE("noise standard deviation is smallest at the blackbody peak") {
    const auto sigma = emissivity_noise_sigma(kGrid, NoiseSpec{1e-3, 330.0, 0});
    const std::size_t arg = static_cast<std::size_t>(std::min_element(sigma.begin(), sigma.end()) - sigma.begin());
    CHECK(std::abs(kGrid[arg] - planck_peak_wavenumber(330.0)) <= 2.0);
    CHECK(sigma[arg] == doctest::Approx(1e-3).epsilon(1e-12));
    for (std::size_t i = arg; i + 1 < sigma.size(); ++i) CHECK(sigma[i + 1] >= sigma[i]);
    for (std::size_t i = arg; i > 0; --i) CHECK(sigma[i - 1] >= sigma[i]);
  }

  TEST_CASE("Monte Carlo variance and independence of the noise") {
    const WavenumberGrid grid = WavenumberGrid::uniform(200.0, 2000.0, 20.0);
    const Spectrum base(grid, std::vector<double>(grid.size(), 0.5));
    const double sr = 2e-3;
    const auto sigma = emissivity_noise_sigma(grid, NoiseSpec{sr, 330.0, 0});
    constexpr int kDraws = 10000;
    std::vector<double> sum(grid.size(), 0.0), sq(grid.size(), 0.0), cross(grid.size(), 0.0);
    for (int d = 0; d < kDraws; ++d) {
      const Spectrum n = emissivity_noise(base, NoiseSpec{sr, 330.0, derive_seed(2024, static_cast<std::uint64_t>(d))});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = n[i] - 0.5;
        sum[i] += e;
        sq[i] += e * e;
        if (i + 1 < grid.size()) cross[i] += e * (n[i + 1] - 0.5);
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double var = sq[i] / kDraws;
      CHECK(var == doctest::Approx(sigma[i] * sigma[i]).epsilon(0.05));
      if (i + 1 < grid.size()) {
        const double cov = cross[i] / kDraws;
        const double se = sigma[i] * sigma[i + 1] / std::sqrt(static_cast<double>(kDraws));
        CHECK(std::abs(cov) < 3.0 * se);
      }
    }
  }

  TEST_CASE("abundance sampling") {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
      const SimplexVector x = sample_abundances(4, rng);
      CHECK(std::accumulate(x.values().begin(), x.values().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      const SimplexVector s = sample_abundances(4, rng, 2);
      CHECK(std::count_if(s.values().begin(), s.values().end(), [](double v) { return v > 0.0; }) == 2);
    }
    CHECK_THROWS_AS(sample_abundances(3, rng, 4), InvalidInput);
  }

  TEST_CASE("dataset generation does not depend on the worker count") {
    const EndmemberLibrary lib = fixture_library(WavenumberGrid::uniform(200.0, 2000.0, 20.0));
    DatasetConfig cfg;
    cfg.count = 12;
    cfg.noise.sigma_radiance = 1e-3;
    cfg.perturb.within_box = true;
    setenv("DISPERSION_UNMIX_THREADS", "1", 1);
    const auto serial = generate_dataset(lib, cfg);
    setenv("DISPERSION_UNMIX_THREADS", "4", 1);
    const auto threaded = generate_dataset(lib, cfg);
    unsetenv("DISPERSION_UNMIX_THREADS");
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(std::equal(serial[i].mixed.values().begin(), serial[i].mixed.values().end(), threaded[i].mixed.values().begin()));
      CHECK(serial[i].truth.abundances == threaded[i].truth.abundances);
    }
  }
}

TEST_SUITE("kmeans") {
  TEST_CASE("k = 1 returns the mean spectrum") {
    const WavenumberGrid g({1.0, 2.0, 3.0});
    const std::vector<Spectrum> s{measured(g, {0.1, 0.2, 0.3}), measured(g, {0.3, 0.4, 0.5}), measured(g, {0.2, 0.9, 0.1})};
    const KMeansResult r = kmeans(s, 1, 9);
    CHECK(r.centroids[0][0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(r.centroids[0][1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.centroids[0][2] == doctest::Approx(0.3).epsilon(1e-15));
  }

  TEST_CASE("two separated clusters recover their means") {
    const WavenumberGrid g({1.0, 2.0});
    std::vector<Spectrum> s;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    double ma0 = 0, ma1 = 0, mb0 = 0, mb1 = 0;
    for (int i = 0; i < 20; ++i) {
      const double a0 = 0.1 + u(rng), a1 = 0.1 + u(rng), b0 = 0.9 + u(rng), b1 = 0.8 + u(rng);
      ma0 += a0 / 20, ma1 += a1 / 20, mb0 += b0 / 20, mb1 += b1 / 20;
      s.push_back(measured(g, {a0, a1}));
      s.push_back(measured(g, {b0, b1}));
    }
    const KMeansResult r = kmeans(s, 2, 1);
    const bool first_low = r.centroids[0][0] < 0.5;
    const Spectrum& low = r.centroids[first_low ? 0 : 1];
    const Spectrum& high = r.centroids[first_low ? 1 : 0];
    CHECK(std::abs(low[0] - ma0) < 1e-6);
    CHECK(std::abs(low[1] - ma1) < 1e-6);
    CHECK(std::abs(high[0] - mb0) < 1e-6);
    CHECK(std::abs(high[1] - mb1) < 1e-6);
  }

  TEST_CASE("k equal to the number of spectra returns the inputs") {
    const WavenumberGrid g({1.0, 2.0});
    const std::vector<Spectrum> s{measured(g, {0.1, 0.2}), measured(g, {0.5, 0.5}), measured(g, {0.9, 0.1})};
    const KMeansResult r = kmeans(s, 3, 2);
    for (const Spectrum& in : s) {
      CHECK(std::any_of(r.centroids.begin(), r.centroids.end(), [&](const Spectrum& c) {
        return c[0] == in[0] && c[1] == in[1];
      }));
    }
  }

  TEST_CASE("within-cluster sum of squares never increases") {
    std::vector<Spectrum> s;
    for (std::uint64_t i = 0; i < 60; ++i) {
      const auto p = gen::random_params(i);
      const Spectrum r = render(p, WavenumberGrid::uniform(200.0, 2000.0, 50.0));
      s.emplace_back(r.grid(), std::vector<double>(r.emissivity().begin(), r.emissivity().end()), true);
    }
    const KMeansResult r = kmeans(s, 5, 3);
    for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) CHECK(r.wcss_trace[i] <= r.wcss_trace[i - 1] + 1e-12);
    CHECK(r.centroids.size() == 5);
  }

  TEST_CASE("too few spectra") {
    const WavenumberGrid g({1.0, 2.0});
    CHECK_THROWS_AS(kmeans({measured(g, {0.1, 0.2})}, 2, 0), InvalidInput);
  }
}
