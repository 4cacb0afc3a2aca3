#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dms/routing.hpp"
#include "dms/storage.hpp"

namespace dms {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks an ephemeral port
  std::filesystem::path data_dir = "data";
  std::chrono::seconds hold_ttl{900};
  std::chrono::seconds session_ttl{24 * 3600};
  routing::Speeds speeds;
  storage::BackendKind backend = storage::BackendKind::Disk;
  std::chrono::seconds expiry_interval{60};
  std::uint32_t hash_iterations = 60'000;
};

/// Throws Config when a TTL, speed, port or iteration count is out of range.
void validate(const ServiceConfig& config);

/// Reads a JSON config file. Unknown keys are rejected; missing keys keep
/// their defaults. Throws Io or Config.
[[nodiscard]] ServiceConfig load_config(const std::filesystem::path& path);
[[nodiscard]] ServiceConfig parse_config(std::string_view json_text);

/// `explicit_path` if given, else $DMS_CONFIG, else nullopt.
[[nodiscard]] std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& explicit_path);

}  // namespace dms
