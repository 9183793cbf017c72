#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace windsteer::cli {

/// Reproducibility record written into every output directory.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::string> argv;
  std::string config_hash;        // FNV-1a 64 of the resolved config JSON, hex
  std::string resolved_config;    // JSON text
  std::map<std::string, std::uint64_t> seeds;
  std::optional<std::string> box_pool_hash;
  std::string started_utc;
  std::optional<std::string> finished_utc;
  int threads = 0;
};

std::string fnv1a_hex(const std::string& bytes);
/// Incremental FNV-1a 64 over files, in the given order; missing files hash
/// their name only.
std::string hash_files(const std::vector<std::string>& paths);
std::string utc_timestamp();

/// Serialises to `path` via a temporary file and rename.
void write_manifest_atomic(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

}  // namespace windsteer::cli
