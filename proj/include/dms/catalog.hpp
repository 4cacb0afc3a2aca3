#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dms/geo.hpp"

namespace dms::catalog {

enum class Category { Cultural, Ecological, Modern };

[[nodiscard]] std::string_view to_string(Category c) noexcept;
/// Exact, case-sensitive match on the enum names; throws Validation otherwise.
[[nodiscard]] Category parse_category(std::string_view text);

/// A catalogued tour site or point of interest.
struct Destination {
  std::string id;
  std::string name;
  Category category = Category::Cultural;
  std::string description;
  geo::GeoPoint location;
  std::vector<std::string> media;
  std::string open_info;
  std::optional<std::string> manager_id;

  friend bool operator==(const Destination&, const Destination&) = default;
};

/// Throws Validation on an empty id or name or an invalid location.
void validate(const Destination& d);

struct NearFilter {
  geo::GeoPoint origin;
  double radius_m = 0.0;
};

struct SearchQuery {
  std::optional<std::string> text;
  std::optional<Category> category;
  std::optional<NearFilter> near;
};

struct IngestError {
  std::size_t line = 0;
  std::string reason;

  friend bool operator==(const IngestError&, const IngestError&) = default;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<IngestError> errors;
  std::vector<std::string> accepted_ids;  // in file order
};

/// Header of the destination ingestion CSV.
inline const std::vector<std::string> kCsvHeader = {"id",  "name",        "category", "lat",
                                                     "lon", "description", "open_info"};

/// Case-insensitive (ASCII) substring match on name and description.
[[nodiscard]] bool matches_text(const Destination& d, std::string_view needle);

/// Orders by (name, id).
[[nodiscard]] bool listing_less(const Destination& a, const Destination& b) noexcept;

/// Thread-safe destination store. Reads share a lock; writes are serialized
/// and become visible all at once.
class Catalog {
 public:
  Catalog() = default;
  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  /// Throws DuplicateId or Validation.
  std::string add_destination(Destination dest);

  /// Throws NotFound.
  [[nodiscard]] Destination get_destination(std::string_view id) const;
  [[nodiscard]] bool contains(std::string_view id) const;
  [[nodiscard]] std::size_t size() const;

  /// Throws Validation on a non-positive radius.
  [[nodiscard]] std::vector<Destination> search(const SearchQuery& query) const;

  /// Rows are validated independently; good rows are inserted in one batch.
  /// Ids already in the catalog (or repeated in the file) are rejected as
  /// duplicates. Throws Io or Format (bad header).
  IngestReport ingest_csv(std::string_view csv_text);
  IngestReport ingest_file(const std::filesystem::path& path);

  /// All destinations ordered by (name, id).
  [[nodiscard]] std::vector<Destination> list() const;

  void clear();

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Destination, std::less<>> by_id_;
};

}  // namespace dms::catalog
