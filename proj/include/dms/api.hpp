#pragma once

#include <map>
#include <string>
#include <string_view>

#include "dms/app.hpp"
#include "dms/error.hpp"

namespace dms::api {

struct CaseInsensitiveLess {
  bool operator()(std::string_view a, std::string_view b) const noexcept;
  using is_transparent = void;
};

using Headers = std::map<std::string, std::string, CaseInsensitiveLess>;

struct Request {
  std::string method;
  std::string target;  // path plus optional "?query"
  Headers headers;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;  // always a JSON document

  friend bool operator==(const Response&, const Response&) = default;
};

/// HTTP status for a module error:
/// Validation/Format/WeakPassword 400, Unauthorized/InvalidCredentials 401,
/// Forbidden 403, NotFound/Unreachable/EmptyGraph 404, conflicts 409,
/// anything else 500.
[[nodiscard]] int status_for(ErrorCode code) noexcept;

/// Decodes %XX escapes and '+' (as space). Returns nullopt on a bad escape.
[[nodiscard]] std::optional<std::string> url_decode(std::string_view s);

/// Parses "lat,lon" in decimal degrees; throws Validation.
[[nodiscard]] geo::GeoPoint parse_latlon(std::string_view text, const char* what);

/// Transport-independent request dispatcher over an App. Total: every input
/// yields a response, malformed ones a 4xx.
class Router {
 public:
  explicit Router(App& app) : app_(app) {}

  [[nodiscard]] Response handle(const Request& request) const;

 private:
  App& app_;
};

}  // namespace dms::api
