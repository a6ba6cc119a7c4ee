#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dunmix/diagnostics.hpp"
#include "dunmix/dispersion.hpp"
#include "dunmix/endmember_fit.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/fixtures.hpp"
#include "dunmix/io.hpp"
#include "dunmix/noise_sweep.hpp"
#include "dunmix/parallel.hpp"
#include "dunmix/synth.hpp"
#include "dunmix/unmixer.hpp"
#include "manifest.hpp"

namespace dunmix::cli {

namespace fs = std::filesystem;

namespace {

struct RenderOpts {
  std::string params;
  std::string fixture;
  std::string grid = "200:2000:4";
  std::string out;
};

struct FitOpts {
  std::string input;
  std::size_t k_init = 50;
  double lambda_rho = 0.01;
  double prune_threshold = 1e-3;
  std::size_t restarts = 4;
  std::uint64_t seed = 7;
  std::string axes = "auto";
  std::size_t steps = 3000;
  std::size_t refit_steps = 1500;
  std::string out;
};

struct UnmixOpts {
  std::string library;
  std::string input;
  std::string batch;
  std::string method = "abs";
  double p = 0.95;
  double lambda_p = 1e-4;
  std::size_t outer_iters = 100;
  double lr = 0.01;
  std::uint64_t seed = 7;
  std::string out;
};

struct SynthOpts {
  std::string library;
  std::size_t count = 1000;
  std::string perturb;
  double noise_sigma = 0.0;
  double temperature = 330.0;
  std::size_t active = 0;
  std::uint64_t seed = 7;
  std::string out;
};

struct DiagnoseOpts {
  std::string library;
  std::string perturb;
  std::size_t runs = 20;
  std::uint64_t seed = 7;
  std::string out;
};

struct LibraryOpts {
  std::vector<std::string> fixtures;
  std::vector<std::string> params;
  std::string grid = "200:2000:4";
  double rho_tol = 0.05;
  double gamma_tol = 0.005;
  double eps_tol = 0.001;
  double omega_tol = 0.0001;
  std::string out;
};

struct SweepOpts {
  std::string library;
  std::vector<double> sigmas{0.0, 1e-4, 3e-4, 1e-3, 3e-3};
  std::size_t mixtures = 10;
  double temperature = 330.0;
  std::size_t outer_iters = 100;
  std::uint64_t seed = 7;
  std::string out;
};

struct ReplayOpts {
  std::string manifest;
};

RunManifest start_manifest(const CLI::App& sub, const std::vector<std::string>& args,
                           std::uint64_t seed) {
  RunManifest m;
  m.command = sub.get_name();
  m.argv = args;
  m.seed = seed;
  m.version = std::string(version());
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      m.config[name] = joined;
    } else {
      m.config[name] = opt->get_default_str();
    }
  }
  return m;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

int run_render(const RenderOpts& o, RunManifest m, std::ostream& out) {
  if (o.params.empty() == o.fixture.empty()) {
    throw InvalidInput("render: give exactly one of --params or --fixture");
  }
  const DispersionParams params = o.fixture.empty() ? read_params(o.params) : load_fixture_params(o.fixture);
  if (!o.params.empty()) m.add_input(o.params);
  const WavenumberGrid grid = parse_grid_spec(o.grid);
  const Spectrum s = render(params, grid);
  ensure_parent(o.out);
  write_spectrum(s, o.out);
  m.add_output(o.out);
  write_manifest(m, manifest_path_for(o.out));
  std::size_t floored = 0;
  for (const AxisParams& a : params.axes()) floored += refractive_index(a, grid).floored_count();
  out << "wrote " << o.out << " (" << s.size() << " samples";
  if (floored > 0) out << ", index floor active at " << floored << " samples";
  out << ")\n";
  return kOk;
}

int run_fit(const FitOpts& o, RunManifest m, std::ostream& out) {
  const Spectrum target = read_spectrum(o.input);
  m.add_input(o.input);
  FitConfig cfg;
  cfg.k_init = o.k_init;
  cfg.lambda_rho = o.lambda_rho;
  cfg.prune_threshold = o.prune_threshold;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.optimizer.steps = o.steps;
  cfg.refit_steps = o.refit_steps;
  std::optional<FitResult> r;
  if (o.axes == "auto") {
    r = select_axis_count(target, cfg);
  } else {
    cfg.axes = o.axes == "2" ? 2 : 1;
    r = fit_endmember(target, cfg);
  }
  const fs::path out_path(o.out);
  fs::path trace_path = out_path;
  trace_path.replace_extension(".trace.csv");
  ensure_parent(out_path);
  write_text_file(trace_path, loss_trace_csv(r->loss_trace));
  write_text_file(out_path, fit_result_to_json(*r, trace_path.filename().string()));
  m.add_output(out_path);
  m.add_output(trace_path);
  write_manifest(m, manifest_path_for(out_path));
  out << "fit: M=" << r->axis_count << " K=" << r->k_final << " mse=" << std::setprecision(6)
      << r->mse << " -> " << o.out << "\n";
  return kOk;
}

UnmixResult unmix_one(const EndmemberLibrary& lib, const Eigen::MatrixXd& A, const MixedSpectrum& b,
                      const UnmixOpts& o) {
  if (o.method == "abs") {
    UnmixConfig cfg;
    cfg.p = o.p;
    cfg.lambda_p = o.lambda_p;
    cfg.outer_iters = o.outer_iters;
    cfg.lambda_step.learning_rate = o.lr;
    return analysis_by_synthesis(lib, b, cfg);
  }
  const double lambda = o.method == "lp" ? o.lambda_p : 0.0;
  SimplexVector x = o.method == "lp" ? solve_abundances(A, b, o.p, lambda) : fcls(A, b);
  const double obj = unmix_objective(A, b.vector(), x.values(), o.p, lambda, 1e-8);
  const double rms = residual_rms(A, b, x);
  return UnmixResult{std::move(x), {}, rms, {}, obj};
}

MixedSpectrum read_mixed(const fs::path& p, const EndmemberLibrary& lib) {
  const Spectrum s = read_spectrum(p);
  if (!(s.grid() == lib.grid())) {
    throw InvalidInput(p.string() + ": wavenumber grid differs from the library grid");
  }
  return MixedSpectrum(s);
}

int run_unmix(const UnmixOpts& o, RunManifest m, std::ostream& out) {
  if (o.input.empty() == o.batch.empty()) throw InvalidInput("unmix: give exactly one of --input or --batch");
  const EndmemberLibrary lib = read_library(o.library);
  m.add_input(o.library);
  const Eigen::MatrixXd A = build_A(lib);

  if (!o.input.empty()) {
    const MixedSpectrum b = read_mixed(o.input, lib);
    m.add_input(o.input);
    const UnmixResult r = unmix_one(lib, A, b, o);
    ensure_parent(o.out);
    write_text_file(o.out, unmix_result_to_json(r, lib, o.method));
    m.add_output(o.out);
    write_manifest(m, manifest_path_for(o.out));
    out << "abundances:";
    for (std::size_t j = 0; j < lib.size(); ++j) out << ' ' << lib[j].name << '=' << r.abundances[j];
    out << "  residual_rms=" << r.residual_rms << "\n";
    return kOk;
  }

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(o.batch)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) throw InvalidInput("unmix: no .csv files in " + o.batch);
  std::vector<MixedSpectrum> pixels;
  for (const auto& p : inputs) {
    pixels.push_back(read_mixed(p, lib));
    m.add_input(p);
  }
  std::vector<std::optional<UnmixResult>> results(pixels.size());
  parallel_for(pixels.size(), [&](std::size_t i) { results[i] = unmix_one(lib, A, pixels[i], o); });

  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::string summary = "name";
  for (std::size_t j = 0; j < lib.size(); ++j) summary += "," + lib[j].name;
  summary += ",residual_rms\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string stem = inputs[i].stem().string();
    const fs::path json_path = dir / (stem + ".json");
    write_text_file(json_path, unmix_result_to_json(*results[i], lib, o.method));
    m.add_output(json_path);
    summary += stem;
    for (double a : results[i]->abundances.values()) summary += "," + format_double(a);
    summary += "," + format_double(results[i]->residual_rms) + "\n";
  }
  write_text_file(dir / "summary.csv", summary);
  m.add_output(dir / "summary.csv");
  write_manifest(m, dir / "run_manifest.json");
  out << "unmixed " << inputs.size() << " spectra -> " << (dir / "summary.csv").string() << "\n";
  return kOk;
}

int run_synth(const SynthOpts& o, RunManifest m, std::ostream& out) {
  const EndmemberLibrary lib = read_library(o.library);
  m.add_input(o.library);
  DatasetConfig cfg;
  cfg.count = o.count;
  cfg.seed = o.seed;
  if (!o.perturb.empty()) {
    cfg.perturb = perturb_from_json(read_text_file(o.perturb), o.perturb);
    m.add_input(o.perturb);
  }
  cfg.noise.sigma_radiance = o.noise_sigma;
  cfg.noise.temperature = o.temperature;
  if (o.active > 0) cfg.active_endmembers = o.active;
  const std::vector<SynthSample> data = generate_dataset(lib, cfg);

  const fs::path dir(o.out);
  fs::create_directories(dir / "spectra");
  const int width = std::max<int>(5, static_cast<int>(std::to_string(data.size()).size()));
  std::string truth = "[\n";
  std::string abundances = "name";
  for (std::size_t j = 0; j < lib.size(); ++j) abundances += "," + lib[j].name;
  abundances += "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::ostringstream name;
    name << "mixture_" << std::setw(width) << std::setfill('0') << i;
    const fs::path csv = dir / "spectra" / (name.str() + ".csv");
    const auto v = data[i].mixed.values();
    write_spectrum(Spectrum(lib.grid(), {v.begin(), v.end()}, true), csv);
    m.add_output(csv);
    std::string record = ground_truth_to_json(data[i].truth, lib);
    record.pop_back();
    truth += "{\"file\": \"spectra/" + csv.filename().string() + "\", \"truth\": " + record + "}";
    truth += i + 1 < data.size() ? ",\n" : "\n";
    abundances += name.str();
    for (double a : data[i].truth.abundances.values()) abundances += "," + format_double(a);
    abundances += "\n";
  }
  truth += "]\n";
  write_text_file(dir / "truth.json", truth);
  write_text_file(dir / "abundances.csv", abundances);
  m.add_output(dir / "truth.json");
  m.add_output(dir / "abundances.csv");
  write_manifest(m, dir / "run_manifest.json");
  out << "wrote " << data.size() << " mixtures to " << dir.string() << "\n";
  return kOk;
}

int run_diagnose(const DiagnoseOpts& o, RunManifest m, std::ostream& out) {
  const EndmemberLibrary lib = read_library(o.library);
  m.add_input(o.library);
  const MatrixReport base = analyze_library(lib);
  std::vector<MatrixReport> reports{base};
  if (!o.perturb.empty()) {
    const PerturbSpec spec = perturb_from_json(read_text_file(o.perturb), o.perturb);
    m.add_input(o.perturb);
    reports = condition_sweep(lib, spec, o.runs, o.seed);
  }
  std::ostringstream csv;
  write_sweep_csv(csv, reports);
  ensure_parent(o.out);
  write_text_file(o.out, csv.str());
  m.add_output(o.out);
  write_manifest(m, manifest_path_for(o.out));
  out << "A: " << base.rows << "x" << base.cols << " rank=" << base.rank
      << " condition=" << std::setprecision(6) << base.condition_number << " singular values:";
  for (double s : base.singular_values) out << ' ' << s;
  out << "\n";
  if (base.floored_samples > 0) out << "index floor active at " << base.floored_samples << " samples\n";
  return kOk;
}

int run_library(const LibraryOpts& o, RunManifest m, std::ostream& out) {
  const WavenumberGrid grid = parse_grid_spec(o.grid);
  const ToleranceSet tol{o.rho_tol, o.gamma_tol, o.eps_tol, o.omega_tol};
  std::vector<Endmember> entries;
  for (const auto& name : o.fixtures) {
    DispersionParams p = load_fixture_params(name);
    ParamBox box = make_tolerance_box(p, tol);
    entries.push_back({name, std::move(p), std::move(box)});
  }
  for (const auto& spec : o.params) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput("library: --params expects name=path, got '" + spec + "'");
    const std::string path = spec.substr(eq + 1);
    DispersionParams p = read_params(path);
    m.add_input(path);
    ParamBox box = make_tolerance_box(p, tol);
    entries.push_back({spec.substr(0, eq), std::move(p), std::move(box)});
  }
  if (entries.empty()) throw InvalidInput("library: give at least one --fixture or --params");
  const EndmemberLibrary lib(grid, std::move(entries));
  ensure_parent(o.out);
  write_library(lib, o.out);
  m.add_output(o.out);
  write_manifest(m, manifest_path_for(o.out));
  out << "wrote library with " << lib.size() << " endmembers to " << o.out << "\n";
  return kOk;
}

int run_sweep(const SweepOpts& o, RunManifest m, std::ostream& out) {
  const EndmemberLibrary lib = read_library(o.library);
  m.add_input(o.library);
  NoiseSweepConfig cfg;
  cfg.sigma_levels = o.sigmas;
  cfg.mixtures_per_level = o.mixtures;
  cfg.temperature = o.temperature;
  cfg.unmix.outer_iters = o.outer_iters;
  cfg.seed = o.seed;
  const auto rows = noise_sweep(lib, cfg);
  std::ostringstream csv;
  write_noise_sweep_csv(csv, rows);
  ensure_parent(o.out);
  write_text_file(o.out, csv.str());
  m.add_output(o.out);
  write_manifest(m, manifest_path_for(o.out));
  out << csv.str();
  return kOk;
}

int run_replay(const ReplayOpts& o, std::ostream& out, std::ostream& err) {
  const RunManifest m = read_manifest(o.manifest);
  for (const auto& f : m.inputs) {
    if (sha256_file(f.path) != f.sha256) {
      err << "replay: input " << f.path << " changed since the recorded run\n";
      return kReplayMismatch;
    }
  }
  std::ostringstream quiet;
  const int code = dispatch(m.argv, quiet, err);
  if (code != kOk) return code;
  bool ok = true;
  for (const auto& f : m.outputs) {
    const std::string now = sha256_file(f.path);
    const bool same = now == f.sha256;
    ok = ok && same;
    out << (same ? "match    " : "MISMATCH ") << f.path << "\n";
  }
  out << (ok ? "replay reproduced all outputs\n" : "replay differs from the recorded run\n");
  return ok ? kOk : kReplayMismatch;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dispersion-model spectral unmixing toolkit", "dunmix"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  RenderOpts ro;
  auto* render_cmd = app.add_subcommand("render", "Render a dispersion model to an emissivity CSV");
  render_cmd->add_option("--params", ro.params, "DispersionParams JSON");
  render_cmd->add_option("--fixture", ro.fixture, "Bundled fixture name (olivine_fo10, biotite, hematite)");
  render_cmd->add_option("--grid", ro.grid, "start:stop:step in cm^-1")->capture_default_str();
  render_cmd->add_option("--out", ro.out, "Output spectrum CSV")->required();

  FitOpts fo;
  auto* fit_cmd = app.add_subcommand("fit", "Fit dispersion parameters to a spectrum");
  fit_cmd->add_option("--input", fo.input, "Spectrum CSV")->required();
  fit_cmd->add_option("--k-init", fo.k_init, "Initial bands per axis")->capture_default_str();
  fit_cmd->add_option("--lambda-rho", fo.lambda_rho, "L1 weight on band strengths")->capture_default_str();
  fit_cmd->add_option("--prune-threshold", fo.prune_threshold, "Drop bands with rho below this")
      ->capture_default_str();
  fit_cmd->add_option("--restarts", fo.restarts, "Random restarts")->capture_default_str();
  fit_cmd->add_option("--seed", fo.seed, "Seed")->capture_default_str();
  fit_cmd->add_option("--axes", fo.axes, "auto, 1 or 2")
      ->check(CLI::IsMember({"auto", "1", "2"}))
      ->capture_default_str();
  fit_cmd->add_option("--steps", fo.steps, "Adam steps of the sparse fit")->capture_default_str();
  fit_cmd->add_option("--refit-steps", fo.refit_steps, "Adam steps of the refit after pruning")
      ->capture_default_str();
  fit_cmd->add_option("--out", fo.out, "Output FitResult JSON")->required();

  UnmixOpts uo;
  auto* unmix_cmd = app.add_subcommand("unmix", "Estimate abundances of a mixed spectrum");
  unmix_cmd->add_option("--library", uo.library, "Library JSON")->required();
  unmix_cmd->add_option("--input", uo.input, "Mixed spectrum CSV");
  unmix_cmd->add_option("--batch", uo.batch, "Directory of mixed spectrum CSVs");
  unmix_cmd->add_option("--method", uo.method, "fcls, lp or abs")
      ->check(CLI::IsMember({"fcls", "lp", "abs"}))
      ->capture_default_str();
  unmix_cmd->add_option("--p", uo.p, "Sparsity exponent")->capture_default_str();
  unmix_cmd->add_option("--lambda-p", uo.lambda_p, "Sparsity weight")->capture_default_str();
  unmix_cmd->add_option("--outer-iters", uo.outer_iters, "Alternating iterations")->capture_default_str();
  unmix_cmd->add_option("--lr", uo.lr, "Lambda-step learning rate (fraction of box width)")
      ->capture_default_str();
  unmix_cmd->add_option("--seed", uo.seed, "Seed (recorded; unmixing is deterministic)")
      ->capture_default_str();
  unmix_cmd->add_option("--out", uo.out, "Result JSON, or output directory with --batch")->required();

  SynthOpts so;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic mixtures");
  synth_cmd->add_option("--library", so.library, "Library JSON")->required();
  synth_cmd->add_option("--count", so.count, "Number of mixtures")->capture_default_str();
  synth_cmd->add_option("--perturb", so.perturb, "Perturbation spec JSON");
  synth_cmd->add_option("--noise-sigma", so.noise_sigma, "Radiance-domain noise sigma")->capture_default_str();
  synth_cmd->add_option("--temperature", so.temperature, "Blackbody temperature (K)")->capture_default_str();
  synth_cmd->add_option("--active", so.active, "Non-zero abundances per mixture (0 = all)")
      ->capture_default_str();
  synth_cmd->add_option("--seed", so.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--out", so.out, "Output directory")->required();

  DiagnoseOpts dopt;
  auto* diag_cmd = app.add_subcommand("diagnose", "Rank and conditioning of the library matrix");
  diag_cmd->add_option("--library", dopt.library, "Library JSON")->required();
  diag_cmd->add_option("--perturb", dopt.perturb, "Perturbation spec JSON for a sweep");
  diag_cmd->add_option("--runs", dopt.runs, "Sweep runs")->capture_default_str();
  diag_cmd->add_option("--seed", dopt.seed, "Seed")->capture_default_str();
  diag_cmd->add_option("--out", dopt.out, "Report CSV")->required();

  LibraryOpts lo;
  auto* lib_cmd = app.add_subcommand("library", "Assemble a library JSON with tolerance boxes");
  lib_cmd->add_option("--fixture", lo.fixtures, "Bundled fixture name (repeatable)");
  lib_cmd->add_option("--params", lo.params, "name=params.json (repeatable)");
  lib_cmd->add_option("--grid", lo.grid, "start:stop:step in cm^-1")->capture_default_str();
  lib_cmd->add_option("--rho-tol", lo.rho_tol, "Relative tolerance on rho")->capture_default_str();
  lib_cmd->add_option("--gamma-tol", lo.gamma_tol, "Relative tolerance on gamma")->capture_default_str();
  lib_cmd->add_option("--eps-tol", lo.eps_tol, "Relative tolerance on eps_r")->capture_default_str();
  lib_cmd->add_option("--omega-tol", lo.omega_tol, "Relative tolerance on omega0")->capture_default_str();
  lib_cmd->add_option("--out", lo.out, "Output library JSON")->required();

  SweepOpts sw;
  auto* sweep_cmd = app.add_subcommand("noise-sweep", "Abundance error of ABS and FCLS versus noise level");
  sweep_cmd->add_option("--library", sw.library, "Library JSON")->required();
  sweep_cmd->add_option("--sigmas", sw.sigmas, "Radiance noise levels")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--mixtures", sw.mixtures, "Mixtures per level")->capture_default_str();
  sweep_cmd->add_option("--temperature", sw.temperature, "Blackbody temperature (K)")->capture_default_str();
  sweep_cmd->add_option("--outer-iters", sw.outer_iters, "Alternating iterations")->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "Seed")->capture_default_str();
  sweep_cmd->add_option("--out", sw.out, "Output CSV")->required();

  ReplayOpts rp;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded command and compare output digests");
  replay_cmd->add_option("--manifest", rp.manifest, "Run manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == render_cmd) return run_render(ro, start_manifest(*sub, args, 0), out);
    if (sub == fit_cmd) return run_fit(fo, start_manifest(*sub, args, fo.seed), out);
    if (sub == unmix_cmd) return run_unmix(uo, start_manifest(*sub, args, uo.seed), out);
    if (sub == synth_cmd) return run_synth(so, start_manifest(*sub, args, so.seed), out);
    if (sub == diag_cmd) return run_diagnose(dopt, start_manifest(*sub, args, dopt.seed), out);
    if (sub == lib_cmd) return run_library(lo, start_manifest(*sub, args, 0), out);
    if (sub == sweep_cmd) return run_sweep(sw, start_manifest(*sub, args, sw.seed), out);
    return run_replay(rp, out, err);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace dunmix::cli
