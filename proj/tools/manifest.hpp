#pragma once

// Run manifests: enough to re-run a command and check that it reproduces
// the same bytes.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dunmix::cli {

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  /// Full argument list (without the program name) to replay the run.
  std::vector<std::string> argv;
  /// Effective option values, defaults included.
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text, const std::string& source);

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

/// `dir/x.csv` -> `dir/x.manifest.json`.
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace dunmix::cli
