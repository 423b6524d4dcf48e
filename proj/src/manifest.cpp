#include "peakshaver/manifest.hpp"

#include <filesystem>

#include <openssl/evp.h>

#include "peakshaver/csv_io.hpp"
#include "peakshaver/errors.hpp"

namespace peakshaver {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw InternalError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

namespace {

nlohmann::json digests_to_json(const std::vector<FileDigest>& files) {
  auto arr = nlohmann::json::array();
  for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return arr;
}

std::vector<FileDigest> digests_from_json(const nlohmann::json& arr) {
  std::vector<FileDigest> out;
  for (const auto& f : arr) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"version", version},         {"seed", seed},
          {"config", config},   {"inputs", digests_to_json(inputs)}, {"outputs", digests_to_json(outputs)}};
}

RunManifest RunManifest::from_json(const nlohmann::json& doc) {
  try {
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.version = doc.at("version").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.config = doc.at("config").get<std::map<std::string, std::string>>();
    m.inputs = digests_from_json(doc.at("inputs"));
    m.outputs = digests_from_json(doc.at("outputs"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("manifest: ") + e.what());
  }
}

std::vector<std::string> verify_manifest(const RunManifest& manifest) {
  std::vector<std::string> bad;
  for (const auto* list : {&manifest.inputs, &manifest.outputs}) {
    for (const auto& f : *list) {
      if (!std::filesystem::exists(f.path) || sha256_file(f.path) != f.sha256) bad.push_back(f.path);
    }
  }
  return bad;
}

}  // namespace peakshaver
