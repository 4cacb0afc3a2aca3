#include "dms/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <iterator>
#include <limits>
#include <queue>
#include <unordered_set>

#include "dms/error.hpp"

namespace dms::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Lower bound on the great-circle distance between points at the two
// latitudes, shaved slightly so floating-point rounding in the haversine
// evaluation can never push a true candidate below it.
double meridian_bound(double lat_a, double lat_b) noexcept {
  const double arc = kEarthRadiusM * std::abs(lat_a - lat_b) * kDegToRad;
  return arc * (1.0 - 1e-12) - 1e-9;
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon > -180.0 && p.lon <= 180.0;
}

void validate(const GeoPoint& p, const char* what) {
  if (!is_valid(p)) {
    fail(ErrorCode::Validation, std::string(what) + ": coordinate out of range (lat " +
                                    std::to_string(p.lat) + ", lon " + std::to_string(p.lon) + ")");
  }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const bool swap = (b.lat < a.lat) || (b.lat == a.lat && b.lon < a.lon);
  const GeoPoint& p = swap ? b : a;
  const GeoPoint& q = swap ? a : b;

  const double lat1 = p.lat * kDegToRad;
  const double lat2 = q.lat * kDegToRad;
  const double half_dlat = (lat2 - lat1) / 2.0;
  const double half_dlon = (q.lon - p.lon) * kDegToRad / 2.0;

  const double s_lat = std::sin(half_dlat);
  const double s_lon = std::sin(half_dlon);
  double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

SpatialIndex SpatialIndex::build(std::vector<Entry> points) {
  std::unordered_set<std::string> seen;
  seen.reserve(points.size());
  for (const auto& [key, point] : points) {
    if (!seen.insert(key).second) fail(ErrorCode::DuplicateKey, "duplicate index key: " + key);
    validate(point, key.c_str());
  }
  std::sort(points.begin(), points.end(), [](const Entry& x, const Entry& y) {
    if (x.second.lat != y.second.lat) return x.second.lat < y.second.lat;
    return x.first < y.first;
  });
  SpatialIndex index;
  index.entries_ = std::move(points);
  return index;
}

std::vector<Hit> SpatialIndex::nearest(const GeoPoint& origin, std::size_t k) const {
  if (k == 0) fail(ErrorCode::Validation, "k must be at least 1");
  validate(origin, "origin");

  // Max-heap on (meters, key): top is the current worst of the best k.
  auto worse = [](const Hit& a, const Hit& b) { return hit_less(a, b); };
  std::priority_queue<Hit, std::vector<Hit>, decltype(worse)> best(worse);

  const auto split = std::lower_bound(
      entries_.begin(), entries_.end(), origin.lat,
      [](const Entry& e, double lat) { return e.second.lat < lat; });
  auto up = split;                    // next candidate at or above origin.lat
  auto down = split;                  // one past next candidate below
  const auto consider = [&](const Entry& e) {
    Hit hit{e.first, haversine_distance(origin, e.second)};
    if (best.size() < k) {
      best.push(std::move(hit));
    } else if (hit_less(hit, best.top())) {
      best.pop();
      best.push(std::move(hit));
    }
  };

  while (up != entries_.end() || down != entries_.begin()) {
    const double up_bound = up != entries_.end()
                                ? meridian_bound(origin.lat, up->second.lat)
                                : std::numeric_limits<double>::infinity();
    const double down_bound = down != entries_.begin()
                                  ? meridian_bound(origin.lat, std::prev(down)->second.lat)
                                  : std::numeric_limits<double>::infinity();
    const double bound = std::min(up_bound, down_bound);
    if (best.size() == k && bound > best.top().meters) break;
    if (up_bound <= down_bound) {
      consider(*up++);
    } else {
      consider(*--down);
    }
  }

  std::vector<Hit> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Hit> SpatialIndex::within_radius(const GeoPoint& origin, double radius_m) const {
  if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
    fail(ErrorCode::Validation, "radius must be a positive number of meters");
  }
  validate(origin, "origin");

  std::vector<Hit> out;
  const auto split = std::lower_bound(
      entries_.begin(), entries_.end(), origin.lat,
      [](const Entry& e, double lat) { return e.second.lat < lat; });
  for (auto it = split; it != entries_.end(); ++it) {
    if (meridian_bound(origin.lat, it->second.lat) > radius_m) break;
    const double d = haversine_distance(origin, it->second);
    if (d <= radius_m) out.push_back({it->first, d});
  }
  for (auto it = split; it != entries_.begin();) {
    --it;
    if (meridian_bound(origin.lat, it->second.lat) > radius_m) break;
    const double d = haversine_distance(origin, it->second);
    if (d <= radius_m) out.push_back({it->first, d});
  }
  std::sort(out.begin(), out.end(), hit_less);
  return out;
}

}  // namespace dms::geo
