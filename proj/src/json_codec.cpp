#include "dms/json_codec.hpp"

#include "dms/error.hpp"

namespace dms {

namespace {

Date date_field(const Json& j, const char* name) {
  const auto text = field<std::string>(j, name);
  const auto d = parse_date(text);
  if (!d) fail(ErrorCode::Validation, std::string("field '") + name + "' is not a YYYY-MM-DD date");
  return *d;
}

}  // namespace

namespace geo {

void to_json(Json& j, const GeoPoint& p) { j = Json{{"lat", p.lat}, {"lon", p.lon}}; }

void from_json(const Json& j, GeoPoint& p) {
  p.lat = field<double>(j, "lat");
  p.lon = field<double>(j, "lon");
}

void to_json(Json& j, const Hit& h) { j = Json{{"key", h.key}, {"meters", h.meters}}; }

}  // namespace geo

namespace catalog {

void to_json(Json& j, const Destination& d) {
  j = Json{{"id", d.id},
           {"name", d.name},
           {"category", to_string(d.category)},
           {"description", d.description},
           {"location", d.location},
           {"media", d.media},
           {"open_info", d.open_info},
           {"manager_id", d.manager_id ? Json(*d.manager_id) : Json(nullptr)}};
}

void from_json(const Json& j, Destination& d) {
  d.id = field<std::string>(j, "id");
  d.name = field<std::string>(j, "name");
  d.category = parse_category(field<std::string>(j, "category"));
  d.description = j.contains("description") ? field<std::string>(j, "description") : "";
  d.location = field<geo::GeoPoint>(j, "location");
  d.media = j.contains("media") ? field<std::vector<std::string>>(j, "media")
                                : std::vector<std::string>{};
  d.open_info = j.contains("open_info") ? field<std::string>(j, "open_info") : "";
  if (j.contains("manager_id") && !j.at("manager_id").is_null()) {
    d.manager_id = field<std::string>(j, "manager_id");
  } else {
    d.manager_id.reset();
  }
}

void to_json(Json& j, const IngestReport& r) {
  Json errors = Json::array();
  for (const auto& e : r.errors) errors.push_back({{"line", e.line}, {"reason", e.reason}});
  j = Json{{"accepted", r.accepted}, {"rejected", r.rejected}, {"errors", errors}};
}

}  // namespace catalog

namespace routing {

void to_json(Json& j, const Node& n) { j = Json{{"id", n.id}, {"location", n.location}}; }

void from_json(const Json& j, Node& n) {
  n.id = field<std::string>(j, "id");
  n.location = field<geo::GeoPoint>(j, "location");
}

void to_json(Json& j, const Edge& e) {
  j = Json{{"from", e.from}, {"to", e.to}, {"length_m", e.length_m}, {"mode", to_string(e.mode)}};
}

void from_json(const Json& j, Edge& e) {
  e.from = field<std::string>(j, "from");
  e.to = field<std::string>(j, "to");
  e.length_m = field<double>(j, "length_m");
  e.mode = parse_mode(field<std::string>(j, "mode"));
}

void to_json(Json& j, const Segment& s) {
  j = Json{{"from", s.from}, {"to", s.to}, {"length_m", s.length_m}, {"mode", to_string(s.mode)}};
}

void to_json(Json& j, const Route& r) {
  j = Json{{"nodes", r.nodes},
           {"segments", r.segments},
           {"total_length_m", r.total_length_m},
           {"est_time_s", r.est_time_s},
           {"metric", to_string(r.metric)}};
}

void to_json(Json& j, const Adjacent& a) {
  j = Json{{"node", a.node}, {"meters", a.meters}, {"mode", to_string(a.mode)}};
}

}  // namespace routing

namespace reservations {

void to_json(Json& j, const RoomType& rt) {
  j = Json{{"name", rt.name},
           {"capacity", rt.capacity},
           {"count", rt.count},
           {"nightly_rate", rt.nightly_rate}};
}

void from_json(const Json& j, RoomType& rt) {
  rt.name = field<std::string>(j, "name");
  rt.capacity = field<int>(j, "capacity");
  rt.count = field<int>(j, "count");
  rt.nightly_rate = field<std::int64_t>(j, "nightly_rate");
}

void to_json(Json& j, const Hotel& h) {
  j = Json{{"id", h.id},
           {"name", h.name},
           {"location", h.location},
           {"destination_id", h.destination_id ? Json(*h.destination_id) : Json(nullptr)},
           {"room_types", h.room_types}};
}

void from_json(const Json& j, Hotel& h) {
  h.id = field<std::string>(j, "id");
  h.name = field<std::string>(j, "name");
  h.location = field<geo::GeoPoint>(j, "location");
  if (j.contains("destination_id") && !j.at("destination_id").is_null()) {
    h.destination_id = field<std::string>(j, "destination_id");
  } else {
    h.destination_id.reset();
  }
  h.room_types = field<std::vector<RoomType>>(j, "room_types");
}

void to_json(Json& j, const Stay& s) {
  j = Json{{"check_in", format_date(s.check_in)}, {"check_out", format_date(s.check_out)}};
}

void from_json(const Json& j, Stay& s) {
  s.check_in = date_field(j, "check_in");
  s.check_out = date_field(j, "check_out");
}

void to_json(Json& j, const Booking& b) {
  j = Json{{"id", b.id},
           {"guest_id", b.guest_id},
           {"hotel_id", b.hotel_id},
           {"room_type", b.room_type},
           {"check_in", format_date(b.stay.check_in)},
           {"check_out", format_date(b.stay.check_out)},
           {"rooms", b.rooms},
           {"state", to_string(b.state)},
           {"hold_expires_at", b.hold_expires_at ? Json(to_unix(*b.hold_expires_at)) : Json(nullptr)}};
}

void from_json(const Json& j, Booking& b) {
  b.id = field<std::string>(j, "id");
  b.guest_id = field<std::string>(j, "guest_id");
  b.hotel_id = field<std::string>(j, "hotel_id");
  b.room_type = field<std::string>(j, "room_type");
  b.stay = {date_field(j, "check_in"), date_field(j, "check_out")};
  b.rooms = field<int>(j, "rooms");
  b.state = parse_booking_state(field<std::string>(j, "state"));
  if (j.contains("hold_expires_at") && !j.at("hold_expires_at").is_null()) {
    b.hold_expires_at = from_unix(field<std::int64_t>(j, "hold_expires_at"));
  } else {
    b.hold_expires_at.reset();
  }
}

void to_json(Json& j, const Availability& a) {
  j = Json{{"hotel_id", a.hotel_id},
           {"room_type", a.room_type},
           {"available", a.available},
           {"nightly_rate", a.nightly_rate}};
}

}  // namespace reservations

namespace identity {

void to_json(Json& j, const UserAccount& u) {
  j = Json{{"id", u.id},
           {"username", u.username},
           {"role", to_string(u.role)},
           {"credential",
            {{"salt", u.credential.salt},
             {"digest", u.credential.digest},
             {"iterations", u.credential.iterations}}}};
}

void from_json(const Json& j, UserAccount& u) {
  u.id = field<std::string>(j, "id");
  u.username = field<std::string>(j, "username");
  u.role = parse_role(field<std::string>(j, "role"));
  const auto c = field<Json>(j, "credential");
  u.credential = {field<std::string>(c, "salt"), field<std::string>(c, "digest"),
                  field<std::uint32_t>(c, "iterations")};
}

void to_json(Json& j, const Session& s) {
  j = Json{{"token", s.token},
           {"user_id", s.user_id},
           {"issued_at", to_unix(s.issued_at)},
           {"expires_at", to_unix(s.expires_at)}};
}

void from_json(const Json& j, Session& s) {
  s.token = field<std::string>(j, "token");
  s.user_id = field<std::string>(j, "user_id");
  s.issued_at = from_unix(field<std::int64_t>(j, "issued_at"));
  s.expires_at = from_unix(field<std::int64_t>(j, "expires_at"));
}

Json public_view(const UserAccount& u) {
  return Json{{"id", u.id}, {"username", u.username}, {"role", to_string(u.role)}};
}

}  // namespace identity

namespace community {

void to_json(Json& j, const Thread& t) {
  j = Json{{"id", t.id},
           {"destination_id", t.destination_id},
           {"title", t.title},
           {"author_id", t.author_id},
           {"created_at", to_unix(t.created_at)}};
}

void from_json(const Json& j, Thread& t) {
  t.id = field<std::string>(j, "id");
  t.destination_id = field<std::string>(j, "destination_id");
  t.title = field<std::string>(j, "title");
  t.author_id = field<std::string>(j, "author_id");
  t.created_at = from_unix(field<std::int64_t>(j, "created_at"));
}

void to_json(Json& j, const Post& p) {
  j = Json{{"id", p.id},
           {"thread_id", p.thread_id},
           {"author_id", p.author_id},
           {"body", p.body},
           {"created_at", to_unix(p.created_at)}};
}

void from_json(const Json& j, Post& p) {
  p.id = field<std::string>(j, "id");
  p.thread_id = field<std::string>(j, "thread_id");
  p.author_id = field<std::string>(j, "author_id");
  p.body = field<std::string>(j, "body");
  p.created_at = from_unix(field<std::int64_t>(j, "created_at"));
}

void to_json(Json& j, const ThreadWithPosts& t) {
  j = t.thread;
  j["posts"] = t.posts;
}

}  // namespace community

}  // namespace dms
