#include "dms/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <mutex>
#include <set>
#include <variant>

#include "dms/csv.hpp"
#include "dms/error.hpp"
#include "dms/text.hpp"

namespace dms::catalog {

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Cultural: return "Cultural";
    case Category::Ecological: return "Ecological";
    case Category::Modern: return "Modern";
  }
  return "Cultural";
}

Category parse_category(std::string_view text) {
  if (text == "Cultural") return Category::Cultural;
  if (text == "Ecological") return Category::Ecological;
  if (text == "Modern") return Category::Modern;
  fail(ErrorCode::Validation,
       "category must be one of Cultural, Ecological, Modern (got '" + std::string(text) + "')");
}

void validate(const Destination& d) {
  if (d.id.empty()) fail(ErrorCode::Validation, "destination id must not be empty");
  if (d.name.empty()) fail(ErrorCode::Validation, "destination name must not be empty");
  geo::validate(d.location, "destination location");
}

bool matches_text(const Destination& d, std::string_view needle) {
  return text::icontains(d.name, needle) || text::icontains(d.description, needle);
}

bool listing_less(const Destination& a, const Destination& b) noexcept {
  if (a.name != b.name) return a.name < b.name;
  return a.id < b.id;
}

std::string Catalog::add_destination(Destination dest) {
  validate(dest);
  std::unique_lock lock(mu_);
  if (by_id_.contains(dest.id)) fail(ErrorCode::DuplicateId, "destination already exists: " + dest.id);
  std::string id = dest.id;
  by_id_.emplace(id, std::move(dest));
  return id;
}

Destination Catalog::get_destination(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(ErrorCode::NotFound, "no destination with id " + std::string(id));
  return it->second;
}

bool Catalog::contains(std::string_view id) const {
  std::shared_lock lock(mu_);
  return by_id_.find(id) != by_id_.end();
}

std::size_t Catalog::size() const {
  std::shared_lock lock(mu_);
  return by_id_.size();
}

std::vector<Destination> Catalog::search(const SearchQuery& query) const {
  if (query.near) {
    if (!(query.near->radius_m > 0.0)) fail(ErrorCode::Validation, "radius must be positive");
    geo::validate(query.near->origin, "near");
  }

  std::shared_lock lock(mu_);
  std::vector<Destination> out;
  auto keep = [&](const Destination& d) {
    if (query.category && d.category != *query.category) return false;
    if (query.text && !matches_text(d, *query.text)) return false;
    return true;
  };

  if (query.near) {
    std::vector<geo::SpatialIndex::Entry> points;
    for (const auto& [id, d] : by_id_) {
      if (keep(d)) points.emplace_back(id, d.location);
    }
    const auto index = geo::SpatialIndex::build(std::move(points));
    for (const auto& hit : index.within_radius(query.near->origin, query.near->radius_m)) {
      out.push_back(by_id_.find(hit.key)->second);
    }
  } else {
    for (const auto& [id, d] : by_id_) {
      if (keep(d)) out.push_back(d);
    }
  }
  std::sort(out.begin(), out.end(), listing_less);
  return out;
}

namespace {

// Returns the reason a row is unusable, or the parsed destination.
std::variant<Destination, std::string> parse_row(const csv::Row& row) {
  if (row.fields.size() != kCsvHeader.size()) {
    return "expected " + std::to_string(kCsvHeader.size()) + " fields, found " +
           std::to_string(row.fields.size());
  }
  Destination d;
  d.id = std::string(text::trim(row.fields[0]));
  d.name = std::string(text::trim(row.fields[1]));
  try {
    d.category = parse_category(text::trim(row.fields[2]));
  } catch (const Error& e) {
    return std::string(e.what());
  }
  const auto lat = text::parse_double(row.fields[3]);
  const auto lon = text::parse_double(row.fields[4]);
  if (!lat) return "latitude is not a number";
  if (!lon) return "longitude is not a number";
  d.location = {*lat, *lon};
  d.description = row.fields[5];
  d.open_info = row.fields[6];
  try {
    validate(d);
  } catch (const Error& e) {
    return std::string(e.what());
  }
  return d;
}

}  // namespace

IngestReport Catalog::ingest_csv(std::string_view csv_text) {
  const auto table = csv::parse(csv_text);
  if (table.header.empty()) fail(ErrorCode::Format, "destinations file has no header");
  csv::require_header(table, kCsvHeader, "destinations file");

  std::unique_lock lock(mu_);
  IngestReport report;
  std::vector<Destination> good;
  std::set<std::string, std::less<>> batch_ids;
  for (const auto& row : table.rows) {
    auto parsed = parse_row(row);
    if (auto* reason = std::get_if<std::string>(&parsed)) {
      report.errors.push_back({row.line, std::move(*reason)});
      continue;
    }
    auto& d = std::get<Destination>(parsed);
    if (by_id_.contains(d.id) || batch_ids.contains(d.id)) {
      report.errors.push_back({row.line, "duplicate id " + d.id});
      continue;
    }
    batch_ids.insert(d.id);
    good.push_back(std::move(d));
  }
  for (auto& d : good) {
    report.accepted_ids.push_back(d.id);
    std::string id = d.id;
    by_id_.emplace(std::move(id), std::move(d));
  }
  report.accepted = report.accepted_ids.size();
  report.rejected = report.errors.size();
  return report;
}

IngestReport Catalog::ingest_file(const std::filesystem::path& path) {
  const auto table_text = [&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  return ingest_csv(table_text);
}

std::vector<Destination> Catalog::list() const {
  return search({});
}

void Catalog::clear() {
  std::unique_lock lock(mu_);
  by_id_.clear();
}

}  // namespace dms::catalog
