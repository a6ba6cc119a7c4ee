#include "dunmix/noise_sweep.hpp"

#include <iomanip>

#include "dunmix/errors.hpp"
#include "dunmix/parallel.hpp"

namespace dunmix {

double abundance_mse(const SimplexVector& estimate, const SimplexVector& truth) {
  if (estimate.size() != truth.size()) throw InvalidInput("abundance_mse: length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double d = estimate[j] - truth[j];
    s += d * d;
  }
  return s / static_cast<double>(truth.size());
}

std::vector<NoiseSweepRow> noise_sweep(const EndmemberLibrary& library,
                                       const NoiseSweepConfig& config) {
  const Eigen::MatrixXd a0 = build_A(library);
  const std::size_t levels = config.sigma_levels.size();
  const std::size_t per = config.mixtures_per_level;
  std::vector<double> abs_err(levels * per);
  std::vector<double> fcls_err(levels * per);

  parallel_for(levels * per, [&](std::size_t task) {
    const std::size_t level = task / per;
    const std::size_t i = task % per;
    const std::uint64_t stream = derive_seed(config.seed, i);
    Rng rng(derive_seed(stream, 0));
    const SimplexVector x = sample_abundances(library.size(), rng);
    PerturbSpec perturb = config.perturb;
    perturb.seed = derive_seed(stream, 1);
    const NoiseSpec noise{config.sigma_levels[level], config.temperature, derive_seed(stream, 2)};
    const SynthSample sample = synth_mixture(library, x, perturb, noise);

    abs_err[task] = abundance_mse(analysis_by_synthesis(library, sample.mixed, config.unmix).abundances, x);
    fcls_err[task] = abundance_mse(fcls(a0, sample.mixed, config.unmix.x_solver), x);
  });

  std::vector<NoiseSweepRow> rows;
  for (std::size_t level = 0; level < levels; ++level) {
    NoiseSweepRow row{config.sigma_levels[level], 0.0, 0.0};
    for (std::size_t i = 0; i < per; ++i) {
      row.abs_mse += abs_err[level * per + i];
      row.fcls_mse += fcls_err[level * per + i];
    }
    row.abs_mse /= static_cast<double>(per);
    row.fcls_mse /= static_cast<double>(per);
    rows.push_back(row);
  }
  return rows;
}

void write_noise_sweep_csv(std::ostream& out, const std::vector<NoiseSweepRow>& rows) {
  out << "sigma_radiance,abs_mse,fcls_mse\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.sigma_radiance << ',' << r.abs_mse << ',' << r.fcls_mse << '\n';
}

}  // namespace dunmix
