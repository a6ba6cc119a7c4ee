#pragma once

// Bundled dispersion parameters for three minerals, transcribed from published
// fitting tables. Axis weights default to uniform.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dunmix/endmember_fit.hpp"
#include "dunmix/types.hpp"
#include "dunmix/unmixer.hpp"

namespace dunmix {

/// One table row exactly as printed (numbers kept as text so the
/// transcription can be compared digit for digit).
struct FixtureRow {
  int axis;
  int index;
  const char* omega0;
  const char* gamma;
  const char* rho;
  const char* eps_r;
};

/// "olivine_fo10", "biotite", "hematite".
std::vector<std::string> fixture_names();

std::span<const FixtureRow> fixture_rows(std::string_view name);

/// Throws InvalidInput for unknown names.
DispersionParams load_fixture_params(std::string_view name);

/// All three fixtures on `grid`, each boxed with `tol`.
EndmemberLibrary fixture_library(const WavenumberGrid& grid, const ToleranceSet& tol = {});

}  // namespace dunmix
