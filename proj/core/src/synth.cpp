#include "dunmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dunmix/dispersion.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/param_layout.hpp"
#include "dunmix/parallel.hpp"

namespace dunmix {

namespace {

// Wien displacement constant for the wavenumber form: root of 3(1 - e^-x) = x.
constexpr double kWienWavenumber = 2.821439372122078893;
constexpr double kTiny = std::numeric_limits<double>::min();

double draw(const Range& r, Rng& rng) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw InvalidInput(std::string("perturb spec: ") + name + " range must satisfy lo <= hi");
  }
  if (positive && !(r.lo > 0.0)) {
    throw InvalidInput(std::string("perturb spec: ") + name + " scales must be > 0");
  }
}

}  // namespace

void PerturbSpec::validate() const {
  check_range(omega0_shift, "omega0_shift", false);
  check_range(gamma_scale, "gamma_scale", true);
  check_range(rho_scale, "rho_scale", true);
  check_range(eps_scale, "eps_scale", true);
}

void NoiseSpec::validate() const {
  if (!(sigma_radiance >= 0.0) || !std::isfinite(sigma_radiance)) {
    throw InvalidInput("noise spec: sigma_radiance must be >= 0");
  }
  if (!(temperature > 0.0)) throw InvalidInput("noise spec: temperature must be > 0");
}

DispersionParams perturb_params(const DispersionParams& params, const PerturbSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<AxisParams> axes;
  for (const auto& axis : params.axes()) {
    const double eps_r = std::max(1.0, axis.eps_r() * draw(spec.eps_scale, rng));
    std::vector<Band> bands(axis.bank().bands().begin(), axis.bank().bands().end());
    for (Band& b : bands) {
      b.omega0 = std::max(kTiny, b.omega0 + draw(spec.omega0_shift, rng));
      b.gamma = std::max(kTiny, b.gamma * draw(spec.gamma_scale, rng));
      b.rho = std::max(0.0, b.rho * draw(spec.rho_scale, rng));
    }
    axes.emplace_back(OscillatorBank(std::move(bands)), eps_r);
  }
  return DispersionParams(std::move(axes), {params.alpha().begin(), params.alpha().end()});
}

DispersionParams perturb_within_box(const DispersionParams& params, const ParamBox& box,
                                    std::uint64_t seed) {
  if (!same_shape(params, box.lower())) throw InvalidInput("perturb: params and box shapes differ");
  Rng rng(seed);
  const FlatBounds bounds = flatten_box(box, false);
  auto flat = flatten(params);
  const ParamLayout layout(params);
  for (std::size_t i = 0; i < layout.alpha_offset(); ++i) {
    flat[i] = draw({bounds.lower[i], bounds.upper[i]}, rng);
  }
  return unflatten(params, flat);
}

std::vector<DispersionParams> perturb_library(const EndmemberLibrary& library,
                                              const PerturbSpec& spec) {
  std::vector<DispersionParams> out;
  for (std::size_t j = 0; j < library.size(); ++j) {
    const std::uint64_t seed = derive_seed(spec.seed, j);
    if (spec.within_box) {
      out.push_back(perturb_within_box(library[j].params, library[j].box, seed));
    } else {
      PerturbSpec s = spec;
      s.seed = seed;
      out.push_back(perturb_params(library[j].params, s));
    }
  }
  return out;
}

double planck(double omega, double temperature) {
  if (!(omega > 0.0) || !(temperature > 0.0)) throw InvalidInput("planck: omega and T must be > 0");
  return omega * omega * omega / std::expm1(kSecondRadiationConstant * omega / temperature);
}

double planck_peak_wavenumber(double temperature) {
  return kWienWavenumber * temperature / kSecondRadiationConstant;
}

std::vector<double> planck_normalized(const WavenumberGrid& grid, double temperature) {
  std::vector<double> b(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) b[i] = planck(grid[i], temperature);
  const double peak = *std::max_element(b.begin(), b.end());
  for (double& v : b) v /= peak;
  return b;
}

std::vector<double> emissivity_noise_sigma(const WavenumberGrid& grid, const NoiseSpec& noise) {
  noise.validate();
  std::vector<double> sigma = planck_normalized(grid, noise.temperature);
  for (double& s : sigma) s = noise.sigma_radiance / std::sqrt(s);
  return sigma;
}

Spectrum emissivity_noise(const Spectrum& spectrum, const NoiseSpec& noise) {
  const std::vector<double> sigma = emissivity_noise_sigma(spectrum.grid(), noise);
  std::vector<double> out(spectrum.emissivity().begin(), spectrum.emissivity().end());
  if (noise.sigma_radiance > 0.0) {
    Rng rng(noise.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sigma[i] * normal(rng);
  }
  return Spectrum(spectrum.grid(), std::move(out), true);
}

SynthSample synth_mixture(const EndmemberLibrary& library, const SimplexVector& abundances,
                          const PerturbSpec& perturb, const NoiseSpec& noise) {
  if (abundances.size() != library.size()) {
    throw InvalidInput("synth: abundance length must equal library size");
  }
  noise.validate();
  GroundTruth truth{abundances, perturb_library(library, perturb), perturb.seed, noise.seed,
                    noise.sigma_radiance, noise.temperature};
  const Eigen::VectorXd clean = replay_noiseless(truth, library.grid());
  Spectrum noisy = emissivity_noise(
      Spectrum(library.grid(), {clean.data(), clean.data() + clean.size()}, true), noise);
  return {MixedSpectrum(noisy), std::move(truth)};
}

Eigen::VectorXd replay_noiseless(const GroundTruth& truth, const WavenumberGrid& grid) {
  const Eigen::MatrixXd A = build_A(truth.perturbed, grid);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    b += truth.abundances[static_cast<std::size_t>(j)] * A.col(j);
  }
  return b;
}

SimplexVector sample_abundances(std::size_t n, Rng& rng, std::optional<std::size_t> active) {
  if (n == 0) throw InvalidInput("sample_abundances: n must be > 0");
  std::vector<std::size_t> support(n);
  std::iota(support.begin(), support.end(), 0);
  if (active) {
    if (*active < 1 || *active > n) throw InvalidInput("sample_abundances: active must be in [1, n]");
    std::shuffle(support.begin(), support.end(), rng);
    support.resize(*active);
  }
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> x(n, 0.0);
  double sum = 0.0;
  for (std::size_t j : support) {
    x[j] = expo(rng);
    sum += x[j];
  }
  for (double& v : x) v /= sum;
  return SimplexVector(std::move(x));
}

std::vector<SynthSample> generate_dataset(const EndmemberLibrary& library,
                                          const DatasetConfig& config) {
  config.perturb.validate();
  config.noise.validate();
  std::vector<std::optional<SynthSample>> slots(config.count);
  parallel_for(config.count, [&](std::size_t i) {
    const std::uint64_t stream = derive_seed(config.seed, i);
    Rng rng(derive_seed(stream, 0));
    const SimplexVector x = sample_abundances(library.size(), rng, config.active_endmembers);
    PerturbSpec perturb = config.perturb;
    perturb.seed = derive_seed(stream, 1);
    NoiseSpec noise = config.noise;
    noise.seed = derive_seed(stream, 2);
    slots[i] = synth_mixture(library, x, perturb, noise);
  });
  std::vector<SynthSample> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace dunmix
