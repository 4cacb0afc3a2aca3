#include "dms/api.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dms/text.hpp"

namespace dms::api {

bool CaseInsensitiveLess::operator()(std::string_view a, std::string_view b) const noexcept {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return text::ascii_lower(x) < text::ascii_lower(y);
  });
}

int status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::Format:
    case ErrorCode::WeakPassword:
      return 400;
    case ErrorCode::Unauthorized:
    case ErrorCode::InvalidCredentials:
      return 401;
    case ErrorCode::Forbidden:
      return 403;
    case ErrorCode::NotFound:
    case ErrorCode::Unreachable:
    case ErrorCode::EmptyGraph:
      return 404;
    case ErrorCode::DuplicateId:
    case ErrorCode::DuplicateKey:
    case ErrorCode::DuplicateUsername:
    case ErrorCode::NoAvailability:
    case ErrorCode::CapacityConflict:
    case ErrorCode::InvalidState:
    case ErrorCode::HoldExpired:
      return 409;
    default:
      return 500;
  }
}

std::optional<std::string> url_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out.push_back(' ');
    } else if (s[i] == '%') {
      if (i + 2 >= s.size()) return std::nullopt;
      const int hi = hex(s[i + 1]);
      const int lo = hex(s[i + 2]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out.push_back(static_cast<char>(hi << 4 | lo));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

geo::GeoPoint parse_latlon(std::string_view text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    fail(ErrorCode::Validation, std::string(what) + " must be 'lat,lon'");
  }
  const auto lat = text::parse_double(text.substr(0, comma));
  const auto lon = text::parse_double(text.substr(comma + 1));
  if (!lat || !lon) fail(ErrorCode::Validation, std::string(what) + " must be 'lat,lon'");
  geo::GeoPoint p{*lat, *lon};
  geo::validate(p, what);
  return p;
}

namespace {

using Query = std::map<std::string, std::string, std::less<>>;

Response json_response(int status, const Json& body) { return {status, body.dump()}; }

Response error_response(ErrorCode code, std::string_view message) {
  return json_response(status_for(code), Json{{"error", to_string(code)}, {"message", message}});
}

struct Parsed {
  std::vector<std::string> segments;
  Query query;
};

Parsed parse_target(std::string_view target) {
  Parsed p;
  const auto qpos = target.find('?');
  const auto path = target.substr(0, qpos);
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) {
      auto seg = url_decode(path.substr(start, end - start));
      if (!seg) fail(ErrorCode::Validation, "bad percent-escape in path");
      p.segments.push_back(std::move(*seg));
    }
    start = end + 1;
  }
  if (qpos != std::string_view::npos) {
    auto rest = target.substr(qpos + 1);
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const auto pair = rest.substr(0, amp);
      if (!pair.empty()) {
        const auto eq = pair.find('=');
        auto key = url_decode(pair.substr(0, eq));
        auto value = url_decode(eq == std::string_view::npos ? "" : pair.substr(eq + 1));
        if (!key || !value) fail(ErrorCode::Validation, "bad percent-escape in query");
        p.query.insert_or_assign(std::move(*key), std::move(*value));
      }
      if (amp == std::string_view::npos) break;
      rest.remove_prefix(amp + 1);
    }
  }
  return p;
}

std::optional<std::string> query_value(const Query& q, std::string_view key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

std::string required_query(const Query& q, std::string_view key) {
  auto v = query_value(q, key);
  if (!v || v->empty()) fail(ErrorCode::Validation, "missing query parameter '" + std::string(key) + "'");
  return *v;
}

double parse_radius(std::string_view text) {
  const auto r = text::parse_double(text);
  if (!r || !std::isfinite(*r) || !(*r > 0.0)) {
    fail(ErrorCode::Validation, "radius_m must be a positive number");
  }
  return *r;
}

Date parse_date_param(std::string_view text, const char* what) {
  const auto d = parse_date(text);
  if (!d) fail(ErrorCode::Validation, std::string(what) + " must be a YYYY-MM-DD date");
  return *d;
}

Json parse_body(const Request& r) {
  if (r.body.empty()) return Json::object();
  auto j = Json::parse(r.body, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::Validation, "request body is not valid JSON");
  if (!j.is_object()) fail(ErrorCode::Validation, "request body must be a JSON object");
  return j;
}

class Dispatch {
 public:
  Dispatch(App& app, const Request& request) : app_(app), req_(request) {}

  Response run() {
    const auto parsed = parse_target(req_.target);
    seg_ = parsed.segments;
    query_ = parsed.query;
    if (seg_.empty() || seg_[0] != "api") return not_found();
    const std::size_t n = seg_.size();
    const auto& m = req_.method;

    if (n == 2 && seg_[1] == "health") return only("GET", [&] { return health(); });
    if (n == 2 && seg_[1] == "session") {
      if (m == "POST") return login();
      if (m == "DELETE") return logout();
      return method_not_allowed();
    }
    if (n == 2 && seg_[1] == "users") return only("POST", [&] { return create_user(); });
    if (n >= 2 && seg_[1] == "destinations") {
      if (n == 2) return only("GET", [&] { return search_destinations(); });
      if (n == 3) {
        if (m == "GET") return get_destination(seg_[2]);
        if (m == "POST") return post_destination(seg_[2]);
        return method_not_allowed();
      }
      if (n == 4 && seg_[3] == "threads") {
        if (m == "GET") return list_threads(seg_[2]);
        if (m == "POST") return create_thread(seg_[2]);
        return method_not_allowed();
      }
    }
    if (n == 2 && seg_[1] == "route") return only("GET", [&] { return route(); });
    if (n == 2 && seg_[1] == "map") return only("GET", [&] { return map(); });
    if (n >= 2 && seg_[1] == "hotels") {
      if (n == 2) {
        if (m == "GET") return list_hotels();
        if (m == "POST") return upsert_hotel();
        return method_not_allowed();
      }
      if (n == 3 && seg_[2] == "availability") return only("GET", [&] { return availability(); });
      if (n == 3) return only("GET", [&] { return get_hotel(seg_[2]); });
    }
    if (n >= 3 && seg_[1] == "bookings") {
      if (n == 3 && seg_[2] == "hold") return only("POST", [&] { return hold(); });
      if (n == 3) {
        if (m == "GET") return get_booking(seg_[2]);
        if (m == "DELETE") return cancel(seg_[2]);
        return method_not_allowed();
      }
      if (n == 4 && seg_[3] == "confirm") return only("POST", [&] { return confirm(seg_[2]); });
    }
    if (n >= 4 && seg_[1] == "threads" && seg_[3] == "posts") {
      if (n == 4) return only("POST", [&] { return post_reply(seg_[2]); });
      if (n == 5) return only("DELETE", [&] { return delete_post(seg_[4]); });
    }
    return not_found();
  }

 private:
  template <typename F>
  Response only(std::string_view method, F&& f) {
    if (req_.method != method) return method_not_allowed();
    return f();
  }

  static Response not_found() { return error_response(ErrorCode::NotFound, "no such endpoint"); }
  static Response method_not_allowed() {
    return json_response(405, Json{{"error", "MethodNotAllowed"}, {"message", "method not allowed"}});
  }

  std::string bearer() const {
    auto it = req_.headers.find("Authorization");
    if (it == req_.headers.end()) fail(ErrorCode::Unauthorized, "missing bearer token");
    const std::string_view v = it->second;
    constexpr std::string_view kPrefix = "Bearer ";
    if (v.size() <= kPrefix.size() || !text::icontains(v.substr(0, kPrefix.size()), kPrefix)) {
      fail(ErrorCode::Unauthorized, "malformed Authorization header");
    }
    return std::string(text::trim(v.substr(kPrefix.size())));
  }

  identity::UserAccount user() const { return app_.authenticate(bearer()); }

  Response health() { return json_response(200, Json{{"status", "ok"}}); }

  Response login() {
    const auto body = parse_body(req_);
    const auto session =
        app_.login(field<std::string>(body, "username"), field<std::string>(body, "password"));
    const auto account = app_.identity().get_user(session.user_id);
    return json_response(200, Json{{"token", session.token},
                                   {"user", identity::public_view(account)},
                                   {"issued_at", to_unix(session.issued_at)},
                                   {"expires_at", to_unix(session.expires_at)}});
  }

  Response logout() {
    app_.logout(bearer());
    return json_response(200, Json{{"status", "logged_out"}});
  }

  Response create_user() {
    const auto body = parse_body(req_);
    const auto role = body.contains("role") ? identity::parse_role(field<std::string>(body, "role"))
                                            : identity::Role::Tourist;
    if (role == identity::Role::SiteManager || role == identity::Role::Admin) {
      if (user().role != identity::Role::Admin) {
        fail(ErrorCode::Forbidden, "only admins may create site manager or admin accounts");
      }
    }
    const auto account = app_.register_user(field<std::string>(body, "username"),
                                            field<std::string>(body, "password"), role);
    return json_response(201, identity::public_view(account));
  }

  Response search_destinations() {
    catalog::SearchQuery q;
    if (auto text = query_value(query_, "q"); text && !text->empty()) q.text = *text;
    if (auto cat = query_value(query_, "category"); cat && !cat->empty()) {
      q.category = catalog::parse_category(*cat);
    }
    const auto near = query_value(query_, "near");
    const auto radius = query_value(query_, "radius_m");
    if (near.has_value() != radius.has_value()) {
      fail(ErrorCode::Validation, "near and radius_m must be given together");
    }
    if (near) q.near = catalog::NearFilter{parse_latlon(*near, "near"), parse_radius(*radius)};
    return json_response(200, Json(app_.catalog().search(q)));
  }

  Response get_destination(const std::string& id) {
    return json_response(200, Json(app_.catalog().get_destination(id)));
  }

  Response post_destination(const std::string& id) {
    const auto actor = user();
    if (actor.role != identity::Role::SiteManager && actor.role != identity::Role::Admin) {
      fail(ErrorCode::Forbidden, "only site managers and admins may add destinations");
    }
    auto body = parse_body(req_);
    if (body.contains("id") && body["id"] != id) {
      fail(ErrorCode::Validation, "body id does not match the path");
    }
    body["id"] = id;
    auto dest = body.get<catalog::Destination>();
    if (actor.role == identity::Role::SiteManager) dest.manager_id = actor.id;
    app_.add_destination(dest);
    return json_response(201, Json(app_.catalog().get_destination(id)));
  }

  Response list_threads(const std::string& destination_id) {
    return json_response(200, Json(app_.community().list_threads(destination_id)));
  }

  Response create_thread(const std::string& destination_id) {
    const auto token = bearer();
    const auto body = parse_body(req_);
    const auto t = app_.create_thread(token, destination_id, field<std::string>(body, "title"));
    return json_response(201, Json(t));
  }

  Response post_reply(const std::string& thread_id) {
    const auto token = bearer();
    const auto body = parse_body(req_);
    const auto p = app_.post_reply(token, thread_id, field<std::string>(body, "body"));
    return json_response(201, Json(p));
  }

  Response delete_post(const std::string& post_id) {
    const auto token = bearer();
    if (app_.community().get_post(post_id).thread_id != seg_[2]) {
      fail(ErrorCode::NotFound, "post " + post_id + " is not in thread " + seg_[2]);
    }
    const auto p = app_.delete_post(token, post_id);
    return json_response(200, Json(p));
  }

  Response route() {
    const auto from = parse_latlon(required_query(query_, "from"), "from");
    const auto to = parse_latlon(required_query(query_, "to"), "to");
    const auto metric = routing::parse_metric(query_value(query_, "metric").value_or("distance"));
    const auto graph = app_.graph();
    const auto src = routing::snap_to_graph(*graph, from);
    const auto dst = routing::snap_to_graph(*graph, to);
    const auto r = routing::shortest_route(*graph, src, dst, metric, app_.config().speeds);
    Json out = r;
    out["from_node"] = src;
    out["to_node"] = dst;
    return json_response(200, out);
  }

  Response map() {
    const auto bbox = required_query(query_, "bbox");
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= bbox.size()) {
      auto end = bbox.find(',', start);
      if (end == std::string::npos) end = bbox.size();
      const auto x = text::parse_double(std::string_view(bbox).substr(start, end - start));
      if (!x) fail(ErrorCode::Validation, "bbox must be s,w,n,e");
      v.push_back(*x);
      start = end + 1;
    }
    if (v.size() != 4) fail(ErrorCode::Validation, "bbox must be s,w,n,e");
    const double s = v[0], w = v[1], n = v[2], e = v[3];
    if (!(s <= n) || s < -90.0 || n > 90.0 || w <= -180.0 || w > 180.0 || e <= -180.0 || e > 180.0) {
      fail(ErrorCode::Validation, "bbox out of range");
    }
    auto inside = [&](const geo::GeoPoint& p) {
      const bool lat_ok = p.lat >= s && p.lat <= n;
      const bool lon_ok = w <= e ? (p.lon >= w && p.lon <= e) : (p.lon >= w || p.lon <= e);
      return lat_ok && lon_ok;
    };

    const auto graph = app_.graph();
    std::set<std::size_t> node_ids;
    for (std::size_t i = 0; i < graph->node_count(); ++i) {
      if (inside(graph->node(i).location)) node_ids.insert(i);
    }
    Json edges = Json::array();
    std::set<std::size_t> endpoints = node_ids;
    for (const auto& edge : graph->edges()) {
      const auto a = graph->find(edge.from);
      const auto b = graph->find(edge.to);
      if (node_ids.contains(a) || node_ids.contains(b)) {
        edges.push_back(edge);
        endpoints.insert(a);
        endpoints.insert(b);
      }
    }
    Json nodes = Json::array();
    for (auto i : endpoints) nodes.push_back(graph->node(i));
    Json pois = Json::array();
    for (const auto& d : app_.catalog().list()) {
      if (inside(d.location)) pois.push_back(d);
    }
    Json hotels = Json::array();
    for (const auto& h : app_.reservations().list_hotels()) {
      if (inside(h.location)) hotels.push_back(h);
    }
    return json_response(200, Json{{"bbox", {s, w, n, e}},
                                   {"nodes", nodes},
                                   {"edges", edges},
                                   {"pois", pois},
                                   {"hotels", hotels}});
  }

  Response list_hotels() { return json_response(200, Json(app_.reservations().list_hotels())); }

  Response get_hotel(const std::string& id) {
    return json_response(200, Json(app_.reservations().get_hotel(id)));
  }

  Response upsert_hotel() {
    const auto actor = user();
    if (actor.role != identity::Role::Admin) fail(ErrorCode::Forbidden, "only admins manage hotels");
    const auto hotel = parse_body(req_).get<reservations::Hotel>();
    app_.upsert_hotel(hotel);
    return json_response(200, Json(app_.reservations().get_hotel(hotel.id)));
  }

  Response availability() {
    const reservations::Stay stay{parse_date_param(required_query(query_, "check_in"), "check_in"),
                                  parse_date_param(required_query(query_, "check_out"), "check_out")};
    int rooms = 1;
    if (auto r = query_value(query_, "rooms")) {
      const auto parsed = text::parse_int(*r);
      if (!parsed || *parsed < 1 || *parsed > 10'000) fail(ErrorCode::Validation, "rooms must be a positive integer");
      rooms = static_cast<int>(*parsed);
    }
    std::optional<reservations::NearFilter> near;
    const auto near_text = query_value(query_, "near");
    const auto radius = query_value(query_, "radius_m");
    if (near_text.has_value() != radius.has_value()) {
      fail(ErrorCode::Validation, "near and radius_m must be given together");
    }
    if (near_text) near = reservations::NearFilter{parse_latlon(*near_text, "near"), parse_radius(*radius)};
    return json_response(200, Json(app_.reservations().search_availability(near, stay, rooms)));
  }

  Response hold() {
    const auto actor = user();
    const auto body = parse_body(req_);
    const auto rooms = body.contains("rooms") ? field<int>(body, "rooms") : 1;
    const auto b = app_.hold_booking(actor.id, field<std::string>(body, "hotel_id"),
                                     field<std::string>(body, "room_type"),
                                     body.get<reservations::Stay>(), rooms);
    return json_response(201, Json(b));
  }

  void require_owner(const identity::UserAccount& actor, const std::string& booking_id) {
    const auto b = app_.reservations().get_booking(booking_id);
    if (b.guest_id != actor.id && actor.role != identity::Role::Admin) {
      fail(ErrorCode::Forbidden, "booking belongs to another user");
    }
  }

  Response get_booking(const std::string& id) {
    require_owner(user(), id);
    return json_response(200, Json(app_.reservations().get_booking(id)));
  }

  Response confirm(const std::string& id) {
    require_owner(user(), id);
    return json_response(200, Json(app_.confirm_booking(id)));
  }

  Response cancel(const std::string& id) {
    require_owner(user(), id);
    return json_response(200, Json(app_.cancel_booking(id)));
  }

  App& app_;
  const Request& req_;
  std::vector<std::string> seg_;
  Query query_;
};

}  // namespace

Response Router::handle(const Request& request) const {
  try {
    return Dispatch(app_, request).run();
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(ErrorCode::Validation, e.what());
  } catch (const std::exception& e) {
    return error_response(ErrorCode::Internal, e.what());
  }
}

}  // namespace dms::api
