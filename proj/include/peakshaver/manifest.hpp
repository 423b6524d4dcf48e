#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace peakshaver {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

struct FileDigest {
  std::string path;
  std::string sha256;
  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

/// What was run, on which inputs, producing which files.
struct RunManifest {
  std::string command;  // CLI subcommand
  std::string version = PEAKSHAVER_VERSION;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  void add_input(const std::string& path) { inputs.push_back({path, sha256_file(path)}); }
  void add_output(const std::string& path) { outputs.push_back({path, sha256_file(path)}); }

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& doc);
  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Files whose current digest differs from the recorded one (missing files included).
std::vector<std::string> verify_manifest(const RunManifest& manifest);

}  // namespace peakshaver
