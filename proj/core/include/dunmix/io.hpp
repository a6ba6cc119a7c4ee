#pragma once

// File formats: spectrum CSV, parameter / library / perturbation JSON, loss
// traces, and SHA-256 digests for run manifests.
//
// Parse errors throw InvalidInput naming the source and line or field;
// filesystem errors throw IoError naming the path.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dunmix/endmember_fit.hpp"
#include "dunmix/synth.hpp"
#include "dunmix/types.hpp"
#include "dunmix/unmixer.hpp"

namespace dunmix {

inline constexpr std::string_view kLibrarySchemaVersion = "1";

/// Library version string, e.g. "0.3.0".
std::string_view version() noexcept;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Spectrum CSV: header `wavenumber,emissivity`, ascending wavenumbers.
Spectrum parse_spectrum_csv(std::string_view text, const std::string& source = "<csv>",
                            bool measured = true);
std::string spectrum_to_csv(const Spectrum& spectrum);
Spectrum read_spectrum(const std::filesystem::path& path, bool measured = true);
void write_spectrum(const Spectrum& spectrum, const std::filesystem::path& path);

/// Grid flag syntax `start:stop:step` (cm^-1).
WavenumberGrid parse_grid_spec(std::string_view spec);

// DispersionParams JSON:
// {"axes":[{"eps_r":f,"bands":[{"omega0":f,"gamma":f,"rho":f},...]},...],"alpha":[f,...]}
// "alpha" may be omitted and then defaults to uniform weights.
DispersionParams params_from_json(std::string_view text, const std::string& source = "<json>");
std::string params_to_json(const DispersionParams& params);
DispersionParams read_params(const std::filesystem::path& path);
void write_params(const DispersionParams& params, const std::filesystem::path& path);

// Library JSON: {"schema_version":"1","grid":[...],
//                "entries":[{"name":s,"params":{...},"box":{"lower":{...},"upper":{...}}}]}
EndmemberLibrary library_from_json(std::string_view text, const std::string& source = "<json>");
std::string library_to_json(const EndmemberLibrary& library);
EndmemberLibrary read_library(const std::filesystem::path& path);
void write_library(const EndmemberLibrary& library, const std::filesystem::path& path);

// Perturbation JSON: {"omega0_shift":[lo,hi],"gamma_scale":[lo,hi],"rho_scale":[lo,hi],
//                     "eps_scale":[lo,hi],"within_box":b,"seed":n}; every field optional.
PerturbSpec perturb_from_json(std::string_view text, const std::string& source = "<json>");
std::string perturb_to_json(const PerturbSpec& spec);

/// CSV `step,loss`.
std::string loss_trace_csv(std::span<const double> trace);

std::string fit_result_to_json(const FitResult& result, const std::string& trace_path);
std::string unmix_result_to_json(const UnmixResult& result, const EndmemberLibrary& library,
                                 const std::string& method);
std::string ground_truth_to_json(const GroundTruth& truth, const EndmemberLibrary& library);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace dunmix
