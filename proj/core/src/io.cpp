#include "dunmix/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>

#include "dunmix/errors.hpp"
#include "json.hpp"

namespace dunmix {

using nlohmann::json;

namespace {

// Rejects keys outside `allowed`, naming the first offender.
void check_fields(const json& obj, std::initializer_list<std::string_view> allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidInput(where + ": unknown field '" + key + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidInput(where + ": expected a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw InvalidInput(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidInput(source + ": " + e.what());
  }
}

// Wraps constructor invariant failures with the location being parsed.
template <typename F>
auto with_context(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const InvalidInput& e) {
    throw InvalidInput(where + ": " + e.what());
  }
}

DispersionParams params_from(const json& j, const std::string& where) {
  check_fields(j, {"axes", "alpha"}, where);
  const json& axes_json = require(j, "axes", where);
  if (!axes_json.is_array()) throw InvalidInput(where + ".axes: expected an array");
  std::vector<AxisParams> axes;
  for (std::size_t m = 0; m < axes_json.size(); ++m) {
    const std::string aw = where + ".axes[" + std::to_string(m) + "]";
    const json& a = axes_json[m];
    check_fields(a, {"eps_r", "bands"}, aw);
    const double eps_r = number(require(a, "eps_r", aw), aw + ".eps_r");
    const json& bands_json = require(a, "bands", aw);
    if (!bands_json.is_array()) throw InvalidInput(aw + ".bands: expected an array");
    std::vector<Band> bands;
    for (std::size_t k = 0; k < bands_json.size(); ++k) {
      const std::string bw = aw + ".bands[" + std::to_string(k) + "]";
      const json& b = bands_json[k];
      check_fields(b, {"omega0", "gamma", "rho"}, bw);
      bands.push_back({number(require(b, "omega0", bw), bw + ".omega0"),
                       number(require(b, "gamma", bw), bw + ".gamma"),
                       number(require(b, "rho", bw), bw + ".rho")});
    }
    axes.push_back(with_context(aw, [&] { return AxisParams(OscillatorBank(std::move(bands)), eps_r); }));
  }
  std::vector<double> alpha;
  if (j.contains("alpha")) {
    alpha = numbers(j["alpha"], where + ".alpha");
  } else {
    alpha.assign(axes.size(), axes.empty() ? 0.0 : 1.0 / static_cast<double>(axes.size()));
  }
  return with_context(where, [&] { return DispersionParams(std::move(axes), std::move(alpha)); });
}

json params_json(const DispersionParams& p) {
  json axes = json::array();
  for (const AxisParams& a : p.axes()) {
    json bands = json::array();
    for (const Band& b : a.bank().bands()) {
      bands.push_back({{"omega0", b.omega0}, {"gamma", b.gamma}, {"rho", b.rho}});
    }
    axes.push_back({{"eps_r", a.eps_r()}, {"bands", std::move(bands)}});
  }
  return {{"axes", std::move(axes)}, {"alpha", std::vector<double>(p.alpha().begin(), p.alpha().end())}};
}

Range range_from(const json& v, const std::string& where) {
  const std::vector<double> r = numbers(v, where);
  if (r.size() != 2) throw InvalidInput(where + ": expected [lo, hi]");
  return {r[0], r[1]};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_field(std::string_view field, const std::string& where) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw InvalidInput(where + ": cannot parse '" + t + "' as a finite number");
  }
  return v;
}

}  // namespace

std::string_view version() noexcept { return DUNMIX_VERSION; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

Spectrum parse_spectrum_csv(std::string_view text, const std::string& source, bool measured) {
  std::vector<double> omega;
  std::vector<double> eps;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != "wavenumber,emissivity") {
        throw InvalidInput(where + ": expected header 'wavenumber,emissivity', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw InvalidInput(where + ": expected two comma-separated fields");
    }
    const double w = parse_field(std::string_view(line).substr(0, comma), where);
    const double e = parse_field(std::string_view(line).substr(comma + 1), where);
    if (!omega.empty() && !(w > omega.back())) {
      throw InvalidInput(where + ": wavenumbers must be strictly ascending (" + format_double(w) +
                         " after " + format_double(omega.back()) + ")");
    }
    omega.push_back(w);
    eps.push_back(e);
  }
  if (!header_seen) throw InvalidInput(source + ": empty file (missing header)");
  return with_context(source, [&] {
    return Spectrum(WavenumberGrid(std::move(omega)), std::move(eps), measured);
  });
}

std::string spectrum_to_csv(const Spectrum& spectrum) {
  std::string out = "wavenumber,emissivity\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    out += format_double(spectrum.grid()[i]);
    out += ',';
    out += format_double(spectrum[i]);
    out += '\n';
  }
  return out;
}

Spectrum read_spectrum(const std::filesystem::path& path, bool measured) {
  return parse_spectrum_csv(read_text_file(path), path.string(), measured);
}

void write_spectrum(const Spectrum& spectrum, const std::filesystem::path& path) {
  write_text_file(path, spectrum_to_csv(spectrum));
}

WavenumberGrid parse_grid_spec(std::string_view spec) {
  const std::string where = "grid '" + std::string(spec) + "'";
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw InvalidInput(where + ": expected start:stop:step");
  const double start = parse_field(spec.substr(0, c1), where);
  const double stop = parse_field(spec.substr(c1 + 1, c2 - c1 - 1), where);
  const double step = parse_field(spec.substr(c2 + 1), where);
  return with_context(where, [&] { return WavenumberGrid::uniform(start, stop, step); });
}

DispersionParams params_from_json(std::string_view text, const std::string& source) {
  return params_from(parse_json(text, source), source);
}

std::string params_to_json(const DispersionParams& params) {
  return params_json(params).dump(2) + "\n";
}

DispersionParams read_params(const std::filesystem::path& path) {
  return params_from_json(read_text_file(path), path.string());
}

void write_params(const DispersionParams& params, const std::filesystem::path& path) {
  write_text_file(path, params_to_json(params));
}

EndmemberLibrary library_from_json(std::string_view text, const std::string& source) {
  const json j = parse_json(text, source);
  check_fields(j, {"schema_version", "grid", "entries"}, source);
  const json& version = require(j, "schema_version", source);
  if (!version.is_string() || version.get<std::string>() != kLibrarySchemaVersion) {
    throw InvalidInput(source + ": unsupported schema_version " + version.dump() + " (expected \"" +
                       std::string(kLibrarySchemaVersion) + "\")");
  }
  WavenumberGrid grid = with_context(source + ".grid", [&] {
    return WavenumberGrid(numbers(require(j, "grid", source), source + ".grid"));
  });
  const json& entries_json = require(j, "entries", source);
  if (!entries_json.is_array()) throw InvalidInput(source + ".entries: expected an array");
  std::vector<Endmember> entries;
  for (std::size_t i = 0; i < entries_json.size(); ++i) {
    const std::string ew = source + ".entries[" + std::to_string(i) + "]";
    const json& e = entries_json[i];
    check_fields(e, {"name", "params", "box"}, ew);
    const json& name = require(e, "name", ew);
    if (!name.is_string()) throw InvalidInput(ew + ".name: expected a string");
    DispersionParams params = params_from(require(e, "params", ew), ew + ".params");
    const json& box = require(e, "box", ew);
    check_fields(box, {"lower", "upper"}, ew + ".box");
    DispersionParams lower = params_from(require(box, "lower", ew + ".box"), ew + ".box.lower");
    DispersionParams upper = params_from(require(box, "upper", ew + ".box"), ew + ".box.upper");
    ParamBox pbox = with_context(ew + ".box", [&] { return ParamBox(std::move(lower), std::move(upper)); });
    entries.push_back({name.get<std::string>(), std::move(params), std::move(pbox)});
  }
  return with_context(source, [&] { return EndmemberLibrary(std::move(grid), std::move(entries)); });
}

std::string library_to_json(const EndmemberLibrary& library) {
  json entries = json::array();
  for (const Endmember& e : library.entries()) {
    entries.push_back({{"name", e.name},
                       {"params", params_json(e.params)},
                       {"box", {{"lower", params_json(e.box.lower())}, {"upper", params_json(e.box.upper())}}}});
  }
  const auto g = library.grid().values();
  const json j = {{"schema_version", kLibrarySchemaVersion},
                  {"grid", std::vector<double>(g.begin(), g.end())},
                  {"entries", std::move(entries)}};
  return j.dump(2) + "\n";
}

EndmemberLibrary read_library(const std::filesystem::path& path) {
  return library_from_json(read_text_file(path), path.string());
}

void write_library(const EndmemberLibrary& library, const std::filesystem::path& path) {
  write_text_file(path, library_to_json(library));
}

PerturbSpec perturb_from_json(std::string_view text, const std::string& source) {
  const json j = parse_json(text, source);
  check_fields(j, {"omega0_shift", "gamma_scale", "rho_scale", "eps_scale", "within_box", "seed"}, source);
  PerturbSpec spec;
  if (j.contains("omega0_shift")) spec.omega0_shift = range_from(j["omega0_shift"], source + ".omega0_shift");
  if (j.contains("gamma_scale")) spec.gamma_scale = range_from(j["gamma_scale"], source + ".gamma_scale");
  if (j.contains("rho_scale")) spec.rho_scale = range_from(j["rho_scale"], source + ".rho_scale");
  if (j.contains("eps_scale")) spec.eps_scale = range_from(j["eps_scale"], source + ".eps_scale");
  if (j.contains("within_box")) {
    if (!j["within_box"].is_boolean()) throw InvalidInput(source + ".within_box: expected a boolean");
    spec.within_box = j["within_box"].get<bool>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InvalidInput(source + ".seed: expected a non-negative integer");
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  with_context(source, [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

std::string perturb_to_json(const PerturbSpec& spec) {
  const auto r = [](const Range& x) { return json::array({x.lo, x.hi}); };
  const json j = {{"omega0_shift", r(spec.omega0_shift)}, {"gamma_scale", r(spec.gamma_scale)},
                  {"rho_scale", r(spec.rho_scale)},       {"eps_scale", r(spec.eps_scale)},
                  {"within_box", spec.within_box},        {"seed", spec.seed}};
  return j.dump(2) + "\n";
}

std::string loss_trace_csv(std::span<const double> trace) {
  std::string out = "step,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(trace[i]);
    out += '\n';
  }
  return out;
}

std::string fit_result_to_json(const FitResult& result, const std::string& trace_path) {
  const json j = {{"params", params_json(result.params)},
                  {"mse", result.mse},
                  {"k_final", result.k_final},
                  {"axis_count", result.axis_count},
                  {"trace", trace_path}};
  return j.dump(2) + "\n";
}

std::string unmix_result_to_json(const UnmixResult& result, const EndmemberLibrary& library,
                                 const std::string& method) {
  json abundances = json::object();
  json refined = json::object();
  for (std::size_t i = 0; i < library.size(); ++i) {
    abundances[library[i].name] = result.abundances[i];
    if (i < result.refined.size()) refined[library[i].name] = params_json(result.refined[i]);
  }
  json j = {{"method", method},
            {"abundances", std::move(abundances)},
            {"residual_rms", result.residual_rms},
            {"objective", result.objective},
            {"loss_trace", result.loss_trace}};
  if (!result.refined.empty()) j["refined"] = std::move(refined);
  return j.dump(2) + "\n";
}

std::string ground_truth_to_json(const GroundTruth& truth, const EndmemberLibrary& library) {
  json perturbed = json::object();
  json abundances = json::object();
  for (std::size_t i = 0; i < library.size(); ++i) {
    abundances[library[i].name] = truth.abundances[i];
    perturbed[library[i].name] = params_json(truth.perturbed[i]);
  }
  const json j = {{"abundances", std::move(abundances)},
                  {"perturbed", std::move(perturbed)},
                  {"perturb_seed", truth.perturb_seed},
                  {"noise_seed", truth.noise_seed},
                  {"sigma_radiance", truth.sigma_radiance},
                  {"temperature", truth.temperature}};
  return j.dump(2) + "\n";
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256: digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

}  // namespace dunmix
