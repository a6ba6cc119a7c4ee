#include "manifest.hpp"

#include "dunmix/errors.hpp"
#include "dunmix/io.hpp"
#include "json.hpp"

namespace dunmix::cli {

using nlohmann::json;

namespace {

json digests_json(const std::vector<FileDigest>& files) {
  json out = json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

std::vector<FileDigest> digests_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  std::vector<FileDigest> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("path") || !e.contains("sha256")) {
      throw InvalidInput(where + ": entries need 'path' and 'sha256'");
    }
    out.push_back({e["path"].get<std::string>(), e["sha256"].get<std::string>()});
  }
  return out;
}

}  // namespace

void RunManifest::add_input(const std::filesystem::path& p) {
  inputs.push_back({p.generic_string(), sha256_file(p)});
}

void RunManifest::add_output(const std::filesystem::path& p) {
  outputs.push_back({p.generic_string(), sha256_file(p)});
}

std::string manifest_to_json(const RunManifest& m) {
  const json j = {{"tool", "dunmix"},
                  {"version", m.version},
                  {"command", m.command},
                  {"argv", m.argv},
                  {"config", m.config},
                  {"seed", m.seed},
                  {"inputs", digests_json(m.inputs)},
                  {"outputs", digests_json(m.outputs)}};
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(source + ": " + e.what());
  }
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.inputs = digests_from(j.at("inputs"), source + ".inputs");
    m.outputs = digests_from(j.at("outputs"), source + ".outputs");
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(source + ": not a run manifest (" + e.what() + ")");
  }
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(m));
}

RunManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_text_file(path), path.string());
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p.replace_extension(".manifest.json");
  return p;
}

}  // namespace dunmix::cli
