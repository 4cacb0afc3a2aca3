#pragma once

// nlohmann::json conversions for every domain type. These define both the
// HTTP wire format and the journal/snapshot format.

#include "json.hpp"

#include "dms/catalog.hpp"
#include "dms/error.hpp"
#include "dms/community.hpp"
#include "dms/geo.hpp"
#include "dms/identity.hpp"
#include "dms/reservations.hpp"
#include "dms/routing.hpp"

namespace dms {

using Json = nlohmann::json;

/// Throws Validation naming the missing or mistyped field.
template <typename T>
T field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::Validation, std::string("missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Validation, std::string("field '") + name + "' has the wrong type");
  }
}

namespace geo {
void to_json(Json& j, const GeoPoint& p);
void from_json(const Json& j, GeoPoint& p);
void to_json(Json& j, const Hit& h);
}  // namespace geo

namespace catalog {
void to_json(Json& j, const Destination& d);
void from_json(const Json& j, Destination& d);
void to_json(Json& j, const IngestReport& r);
}  // namespace catalog

namespace routing {
void to_json(Json& j, const Node& n);
void from_json(const Json& j, Node& n);
void to_json(Json& j, const Edge& e);
void from_json(const Json& j, Edge& e);
void to_json(Json& j, const Segment& s);
void to_json(Json& j, const Route& r);
void to_json(Json& j, const Adjacent& a);
}  // namespace routing

namespace reservations {
void to_json(Json& j, const RoomType& rt);
void from_json(const Json& j, RoomType& rt);
void to_json(Json& j, const Hotel& h);
void from_json(const Json& j, Hotel& h);
void to_json(Json& j, const Stay& s);
void from_json(const Json& j, Stay& s);
void to_json(Json& j, const Booking& b);
void from_json(const Json& j, Booking& b);
void to_json(Json& j, const Availability& a);
}  // namespace reservations

namespace identity {
/// Storage form, including the credential record.
void to_json(Json& j, const UserAccount& u);
void from_json(const Json& j, UserAccount& u);
void to_json(Json& j, const Session& s);
void from_json(const Json& j, Session& s);
/// API form: id, username and role only.
[[nodiscard]] Json public_view(const UserAccount& u);
}  // namespace identity

namespace community {
void to_json(Json& j, const Thread& t);
void from_json(const Json& j, Thread& t);
void to_json(Json& j, const Post& p);
void from_json(const Json& j, Post& p);
void to_json(Json& j, const ThreadWithPosts& t);
}  // namespace community

}  // namespace dms
