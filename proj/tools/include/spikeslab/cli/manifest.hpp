#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "spikeslab/cli/config.hpp"

namespace spikeslab::cli {

struct RunManifest {
  std::string command;
  std::string config_digest;  // sha256 of canonical_config(resolved)
  Json config;
  std::uint64_t seed = 0;
  std::string version;
  std::string started_utc;
  std::string finished_utc;
  std::string status = "ok";
};

// Compact dump with sorted keys.
std::string canonical_config(const Json& resolved);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now();

Json to_json(const RunManifest& m);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace spikeslab::cli
