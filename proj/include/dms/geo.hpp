#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dms::geo {

/// Mean Earth radius in meters used for every distance computation.
inline constexpr double kEarthRadiusM = 6'371'008.8;

/// A WGS84-style coordinate in decimal degrees.
///
/// Valid points have finite lat in [-90, 90] and lon in (-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

[[nodiscard]] bool is_valid(const GeoPoint& p) noexcept;

/// Throws Error(Validation) naming `what` if `p` is out of range.
void validate(const GeoPoint& p, const char* what = "location");

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
///
/// Symmetric: the operands are put in a canonical order before evaluation so
/// haversine_distance(a, b) and haversine_distance(b, a) are bit-identical.
[[nodiscard]] double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

struct Hit {
  std::string key;
  double meters = 0.0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Strict (distance, key) ordering shared by every proximity query.
[[nodiscard]] inline bool hit_less(const Hit& a, const Hit& b) noexcept {
  if (a.meters != b.meters) return a.meters < b.meters;
  return a.key < b.key;
}

/// Immutable point index for nearest-k and radius queries.
///
/// Entries are kept sorted by latitude; a query walks outward from the
/// origin's latitude and stops once the meridian-arc lower bound exceeds the
/// current cut-off. Results are identical to a linear scan.
class SpatialIndex {
 public:
  using Entry = std::pair<std::string, GeoPoint>;

  SpatialIndex() = default;

  /// Throws DuplicateKey on repeated keys and Validation on bad points.
  static SpatialIndex build(std::vector<Entry> points);

  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }

  /// The k closest entries ascending by (meters, key). Throws Validation on k == 0.
  [[nodiscard]] std::vector<Hit> nearest(const GeoPoint& origin, std::size_t k) const;

  /// Entries with distance <= radius_m, ascending by (meters, key).
  /// Throws Validation unless radius_m > 0.
  [[nodiscard]] std::vector<Hit> within_radius(const GeoPoint& origin, double radius_m) const;

 private:
  std::vector<Entry> entries_;  // sorted by (lat, key)
};

}  // namespace dms::geo
