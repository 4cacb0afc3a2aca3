#include "dms/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <set>

#include "dms/error.hpp"
#include "dms/json_codec.hpp"
#include "dms/text.hpp"

namespace dms {

void validate(const ServiceConfig& c) {
  if (c.hold_ttl.count() <= 0) fail(ErrorCode::Config, "hold_ttl_s must be positive");
  if (c.session_ttl.count() <= 0) fail(ErrorCode::Config, "session_ttl_s must be positive");
  if (c.expiry_interval.count() <= 0) fail(ErrorCode::Config, "expiry_interval_s must be positive");
  if (!(c.speeds.walk_kmh > 0.0) || !(c.speeds.drive_kmh > 0.0)) {
    fail(ErrorCode::Config, "mode speeds must be positive");
  }
  if (c.port < 0 || c.port > 65535) fail(ErrorCode::Config, "port out of range");
  if (c.host.empty()) fail(ErrorCode::Config, "listen host must not be empty");
  if (c.hash_iterations == 0) fail(ErrorCode::Config, "hash_iterations must be positive");
  if (c.backend == storage::BackendKind::Disk && c.data_dir.empty()) {
    fail(ErrorCode::Config, "disk backend needs a data_dir");
  }
}

ServiceConfig parse_config(std::string_view json_text) {
  const auto doc = Json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::Config, "config is not a JSON object");

  static const std::set<std::string> kKeys = {"listen",        "data_dir",   "hold_ttl_s",
                                              "session_ttl_s", "speeds",     "backend",
                                              "expiry_interval_s", "hash_iterations"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.contains(key)) fail(ErrorCode::Config, "unknown config key '" + key + "'");
  }

  ServiceConfig c;
  try {
    if (doc.contains("listen")) {
      const auto listen = doc["listen"].get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) fail(ErrorCode::Config, "listen must be host:port");
      c.host = listen.substr(0, colon);
      const auto port = text::parse_int(listen.substr(colon + 1));
      if (!port) fail(ErrorCode::Config, "listen port is not a number");
      c.port = static_cast<int>(*port);
    }
    if (doc.contains("data_dir")) c.data_dir = doc["data_dir"].get<std::string>();
    if (doc.contains("hold_ttl_s")) c.hold_ttl = std::chrono::seconds{doc["hold_ttl_s"].get<std::int64_t>()};
    if (doc.contains("session_ttl_s")) {
      c.session_ttl = std::chrono::seconds{doc["session_ttl_s"].get<std::int64_t>()};
    }
    if (doc.contains("expiry_interval_s")) {
      c.expiry_interval = std::chrono::seconds{doc["expiry_interval_s"].get<std::int64_t>()};
    }
    if (doc.contains("hash_iterations")) {
      const auto n = doc["hash_iterations"].get<std::int64_t>();
      if (n <= 0 || n > 10'000'000) fail(ErrorCode::Config, "hash_iterations out of range");
      c.hash_iterations = static_cast<std::uint32_t>(n);
    }
    if (doc.contains("speeds")) {
      const auto& s = doc["speeds"];
      if (s.contains("walk_kmh")) c.speeds.walk_kmh = s["walk_kmh"].get<double>();
      if (s.contains("drive_kmh")) c.speeds.drive_kmh = s["drive_kmh"].get<double>();
    }
    if (doc.contains("backend")) c.backend = storage::parse_backend(doc["backend"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("config value has the wrong type: ") + e.what());
  }
  validate(c);
  return c;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
  auto c = parse_config(std::string(std::istreambuf_iterator<char>(in), {}));
  // A relative data_dir is taken relative to the config file.
  if (c.data_dir.is_relative()) c.data_dir = path.parent_path() / c.data_dir;
  return c;
}

std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return explicit_path;
  if (const char* env = std::getenv("DMS_CONFIG"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

}  // namespace dms
