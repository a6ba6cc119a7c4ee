#include <cmath>

#include "doctest.h"
#include "dunmix/dispersion.hpp"
#include "dunmix/endmember_fit.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/fixtures.hpp"
#include "generators.hpp"

using namespace dunmix;

namespace {

const WavenumberGrid kGrid = WavenumberGrid::uniform(200.0, 2000.0, 8.0);

FitConfig small_config() {
  FitConfig cfg;
  cfg.k_init = 5;
  cfg.restarts = 2;
  cfg.optimizer.steps = 1500;
  cfg.refit_steps = 1000;
  return cfg;
}

}  // namespace

TEST_SUITE("fit") {
  TEST_CASE("tolerance box arithmetic") {
    const DispersionParams p(AxisParams(OscillatorBank({{1000.0, 0.05, 0.1}, {500.0, 0.2, 0.0}}), 2.0));
    const ParamBox box = make_tolerance_box(p);
    const Band lo = box.lower().axes()[0].bank()[0];
    const Band hi = box.upper().axes()[0].bank()[0];
    CHECK(lo.omega0 == doctest::Approx(999.9).epsilon(1e-15));
    CHECK(hi.omega0 == doctest::Approx(1000.1).epsilon(1e-15));
    CHECK(lo.rho == doctest::Approx(0.095).epsilon(1e-15));
    CHECK(hi.rho == doctest::Approx(0.105).epsilon(1e-15));
    CHECK(lo.gamma == doctest::Approx(0.05 * 0.995).epsilon(1e-15));
    CHECK(box.lower().axes()[0].eps_r() == doctest::Approx(1.998).epsilon(1e-15));
    const Band dead_lo = box.lower().axes()[0].bank()[1];
    const Band dead_hi = box.upper().axes()[0].bank()[1];
    CHECK(dead_lo.rho == 0.0);
    CHECK(dead_hi.rho == 0.0);
    CHECK(box.contains(p));
  }

  TEST_CASE("tolerance box keeps eps_r at or above 1") {
    const DispersionParams p(AxisParams(OscillatorBank(), 1.0));
    const ParamBox box = make_tolerance_box(p);
    CHECK(box.lower().axes()[0].eps_r() == 1.0);
    CHECK(box.upper().axes()[0].eps_r() == doctest::Approx(1.001).epsilon(1e-15));
  }

  TEST_CASE("single-band round trip") {
    const DispersionParams truth(gen::single_band(2.356, 1161.0, 0.1, 0.67));
    const Spectrum target = render(truth, kGrid);
    const FitResult r = fit_endmember(target, small_config());
    CHECK(r.mse < 1e-6);
    const Spectrum fit = render(r.params, kGrid);
    for (std::size_t i = 0; i < kGrid.size(); ++i) CHECK(std::abs(fit[i] - target[i]) < 1e-3);
    CHECK(r.k_final <= 5);
    CHECK(r.box.contains(r.params));
  }

  TEST_CASE("constant 8/9 target fits a bare eps_r = 4 dielectric") {
    const Spectrum target(kGrid, std::vector<double>(kGrid.size(), 8.0 / 9.0));
    const FitResult r = fit_endmember(target, small_config());
    CHECK(r.mse < 1e-8);
    CHECK(r.k_final == 0);
    CHECK(r.params.axes()[0].eps_r() == doctest::Approx(4.0).epsilon(1e-3));
  }

  TEST_CASE("fits are deterministic for a fixed seed") {
    const DispersionParams truth(gen::single_band(1.8, 700.0, 0.05, 0.3));
    const Spectrum target = render(truth, kGrid);
    const FitResult a = fit_endmember(target, small_config());
    const FitResult b = fit_endmember(target, small_config());
    CHECK(a.params == b.params);
    CHECK(a.mse == b.mse);
    CHECK(a.loss_trace == b.loss_trace);
  }

  TEST_CASE("axis selection prefers one axis on a constant target") {
    const Spectrum target(kGrid, std::vector<double>(kGrid.size(), 8.0 / 9.0));
    FitConfig cfg = small_config();
    cfg.k_init = 2;
    const FitResult r = select_axis_count(target, cfg);
    CHECK(r.axis_count == 1);
  }

  TEST_CASE("axis selection on a single-axis target") {
    const DispersionParams truth(gen::single_band(2.0, 900.0, 0.08, 0.4));
    const Spectrum target = render(truth, kGrid);
    FitConfig cfg = small_config();
    cfg.k_init = 3;
    const FitResult r = select_axis_count(target, cfg);
    FitConfig one = cfg;
    one.axes = 1;
    const FitResult r1 = fit_endmember(target, one);
    CHECK((r.axis_count == 1 || r.mse <= r1.mse + 1e-9));
    CHECK(r.mse <= r1.mse);
  }

  TEST_CASE("axis selection on the two-axis olivine spectrum returns the better fit") {
    const Spectrum target = render(load_fixture_params("olivine_fo10"), kGrid);
    FitConfig cfg;
    cfg.k_init = 20;
    cfg.restarts = 1;
    cfg.optimizer.steps = 800;
    cfg.refit_steps = 400;
    FitConfig one = cfg;
    one.axes = 1;
    FitConfig two = cfg;
    two.axes = 2;
    const FitResult r1 = fit_endmember(target, one);
    const FitResult r2 = fit_endmember(target, two);
    const FitResult best = select_axis_count(target, cfg);
    CHECK(best.mse == std::min(r1.mse, r2.mse));
    if (best.axis_count == 2) {
      const double a = best.params.alpha()[0] + best.params.alpha()[1];
      CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("pruning and refitting degrades the fit by a bounded amount") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CAPTURE(seed);
      const DispersionParams truth = random_initial_params(kGrid, 1, 3, 500 + seed);
      const Spectrum target = render(truth, kGrid);
      FitConfig cfg = small_config();
      cfg.restarts = 1;
      cfg.seed = seed;
      const FitResult r = fit_endmember(target, cfg);
      const double n = static_cast<double>(kGrid.size());
      CHECK(r.mse <= r.pre_prune_mse + cfg.lambda_rho * r.pruned_rho_mass / n + 1e-15);
      CHECK(r.box.contains(r.params));
    }
  }

  TEST_CASE("invalid configurations are rejected") {
    const Spectrum target(kGrid, std::vector<double>(kGrid.size(), 0.9));
    FitConfig cfg = small_config();
    cfg.k_init = 0;
    CHECK_THROWS_AS(fit_endmember(target, cfg), InvalidInput);
    cfg = small_config();
    cfg.lambda_rho = -1.0;
    CHECK_THROWS_AS(fit_endmember(target, cfg), InvalidInput);
    cfg = small_config();
    cfg.axes = 3;
    CHECK_THROWS_AS(fit_endmember(target, cfg), InvalidInput);
  }
}
