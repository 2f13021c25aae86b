#pragma once

// Run manifests: output inventory with SHA-256 checksums, written atomically.

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "citesim/citesim.hpp"

namespace citesim::cli {

inline constexpr const char* kManifestFile = "manifest.json";

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::filesystem::path> files;  // relative to the output directory
};

/// Checksums every listed file and writes manifest.json via a rename.
inline void write_manifest(const std::filesystem::path& dir, RunManifest m) {
  m.finished_at = utc_timestamp();
  Json files = Json::array();
  for (const auto& rel : m.files) {
    const auto path = dir / rel;
    files.push_back({{"path", rel.generic_string()},
                     {"bytes", std::filesystem::file_size(path)},
                     {"sha256", sha256_file(path)}});
  }
  const Json doc = {{"tool", "citesim"},
                    {"version", kVersion},
                    {"command", m.command},
                    {"config_hash", m.config_hash},
                    {"master_seed", m.master_seed},
                    {"started_at", m.started_at},
                    {"finished_at", m.finished_at},
                    {"files", files}};
  const auto tmp = dir / (std::string(kManifestFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / kManifestFile);
}

/// Files whose size or checksum no longer match the manifest.
inline std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  const Json doc = read_json_file(dir / kManifestFile);
  std::vector<std::string> bad;
  for (const auto& f : doc.at("files")) {
    const auto rel = f.at("path").get<std::string>();
    const auto path = dir / rel;
    if (!std::filesystem::exists(path) || std::filesystem::file_size(path) != f.at("bytes").get<std::uintmax_t>() ||
        sha256_file(path) != f.at("sha256").get<std::string>())
      bad.push_back(rel);
  }
  return bad;
}

}  // namespace citesim::cli
