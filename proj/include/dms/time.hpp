#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dms {

/// Calendar date without a time zone.
using Date = std::chrono::sys_days;
/// Whole seconds since the Unix epoch.
using Timestamp = std::chrono::sys_seconds;

/// Strict ISO-8601 calendar date "YYYY-MM-DD"; nullopt on anything else,
/// including impossible dates such as 2026-02-30.
[[nodiscard]] std::optional<Date> parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Date d);

[[nodiscard]] inline Timestamp from_unix(std::int64_t seconds) {
  return Timestamp{std::chrono::seconds{seconds}};
}
[[nodiscard]] inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

[[nodiscard]] inline Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace dms
