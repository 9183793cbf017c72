#include "windsteer/cli/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "windsteer/errors.hpp"

namespace windsteer::cli {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, const char* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  return hex(fnv1a(kFnvOffset, bytes.data(), bytes.size()));
}

std::string hash_files(const std::vector<std::string>& paths) {
  std::uint64_t h = kFnvOffset;
  std::vector<char> buf(1 << 16);
  for (const auto& p : paths) {
    const std::string name = std::filesystem::path(p).filename().string();
    h = fnv1a(h, name.data(), name.size());
    std::ifstream in(p, std::ios::binary);
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      h = fnv1a(h, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  return hex(h);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest_atomic(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["tool"] = "windsteer";
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  j["box_pool_hash"] = m.box_pool_hash ? nlohmann::ordered_json(*m.box_pool_hash) : nullptr;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc ? nlohmann::ordered_json(*m.finished_utc) : nullptr;
  j["threads"] = m.threads;
  j["config"] = nlohmann::ordered_json::parse(m.resolved_config.empty() ? "{}" : m.resolved_config);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp, "cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(tmp, "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path, "cannot move manifest into place (" + ec.message() + ")");
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "manifest not found");
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.tool_version = j.at("tool_version");
    m.command = j.at("command");
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config_hash = j.at("config_hash");
    m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    if (!j.at("box_pool_hash").is_null()) m.box_pool_hash = j.at("box_pool_hash").get<std::string>();
    m.started_utc = j.at("started_utc");
    if (!j.at("finished_utc").is_null()) m.finished_utc = j.at("finished_utc").get<std::string>();
    m.threads = j.at("threads");
    m.resolved_config = j.at("config").dump(2);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("malformed manifest (") + e.what() + ")");
  }
  return m;
}

}  // namespace windsteer::cli
