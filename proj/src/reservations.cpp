#include "dms/reservations.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <mutex>
#include <set>

#include "dms/csv.hpp"
#include "dms/error.hpp"
#include "dms/text.hpp"

namespace dms::reservations {

std::string_view to_string(BookingState s) noexcept {
  switch (s) {
    case BookingState::Held: return "held";
    case BookingState::Confirmed: return "confirmed";
    case BookingState::Cancelled: return "cancelled";
    case BookingState::Expired: return "expired";
  }
  return "held";
}

BookingState parse_booking_state(std::string_view text) {
  if (text == "held") return BookingState::Held;
  if (text == "confirmed") return BookingState::Confirmed;
  if (text == "cancelled") return BookingState::Cancelled;
  if (text == "expired") return BookingState::Expired;
  fail(ErrorCode::Validation, "unknown booking state " + std::string(text));
}

bool transition_allowed(BookingState from, BookingState to) noexcept {
  switch (from) {
    case BookingState::Held:
      return to == BookingState::Confirmed || to == BookingState::Cancelled ||
             to == BookingState::Expired;
    case BookingState::Confirmed:
      return to == BookingState::Cancelled;
    case BookingState::Cancelled:
    case BookingState::Expired:
      return false;
  }
  return false;
}

void validate_request(const Stay& stay, int rooms) {
  if (!(stay.check_in < stay.check_out)) {
    fail(ErrorCode::Validation, "check_in must be before check_out");
  }
  if (stay.nights() > kMaxStayNights) {
    fail(ErrorCode::Validation, "stay longer than " + std::to_string(kMaxStayNights) + " nights");
  }
  if (rooms < 1) fail(ErrorCode::Validation, "rooms must be at least 1");
}

void validate(const Hotel& hotel) {
  if (hotel.id.empty()) fail(ErrorCode::Validation, "hotel id must not be empty");
  if (hotel.name.empty()) fail(ErrorCode::Validation, "hotel name must not be empty");
  geo::validate(hotel.location, "hotel location");
  std::set<std::string_view> names;
  for (const auto& rt : hotel.room_types) {
    if (rt.name.empty()) fail(ErrorCode::Validation, "room type name must not be empty");
    if (!names.insert(rt.name).second) {
      fail(ErrorCode::Validation, "duplicate room type '" + rt.name + "' in hotel " + hotel.id);
    }
    if (rt.capacity < 1) fail(ErrorCode::Validation, "room capacity must be at least 1");
    if (rt.count < 0) fail(ErrorCode::Validation, "room count must not be negative");
    if (rt.nightly_rate < 0) fail(ErrorCode::Validation, "nightly rate must not be negative");
  }
}

std::vector<Hotel> parse_hotels_csv(std::string_view csv_text) {
  const auto table = csv::parse(csv_text);
  csv::require_header(table, kHotelCsvHeader, "hotel file");

  std::vector<Hotel> hotels;
  for (const auto& row : table.rows) {
    const auto at = "hotel file line " + std::to_string(row.line) + ": ";
    if (row.fields.size() != kHotelCsvHeader.size()) fail(ErrorCode::Format, at + "wrong field count");
    const auto lat = text::parse_double(row.fields[2]);
    const auto lon = text::parse_double(row.fields[3]);
    const auto capacity = text::parse_int(row.fields[6]);
    const auto count = text::parse_int(row.fields[7]);
    const auto rate = text::parse_int(row.fields[8]);
    if (!lat || !lon || !capacity || !count || !rate) fail(ErrorCode::Format, at + "bad number");
    if (*capacity > std::numeric_limits<int>::max() || *count > std::numeric_limits<int>::max()) {
      fail(ErrorCode::Format, at + "number out of range");
    }

    const std::string id(text::trim(row.fields[0]));
    auto it = std::find_if(hotels.begin(), hotels.end(), [&](const Hotel& h) { return h.id == id; });
    if (it == hotels.end()) {
      Hotel h;
      h.id = id;
      h.name = std::string(text::trim(row.fields[1]));
      h.location = {*lat, *lon};
      const auto dest = text::trim(row.fields[4]);
      if (!dest.empty()) h.destination_id = std::string(dest);
      hotels.push_back(std::move(h));
      it = std::prev(hotels.end());
    }
    it->room_types.push_back({std::string(text::trim(row.fields[5])), static_cast<int>(*capacity),
                              static_cast<int>(*count), *rate});
  }
  for (const auto& h : hotels) validate(h);
  return hotels;
}

Reservations::Reservations(std::chrono::seconds hold_ttl) : hold_ttl_(hold_ttl) {
  if (hold_ttl_.count() <= 0) fail(ErrorCode::Validation, "hold TTL must be positive");
}

const RoomType* Reservations::find_type(const Hotel& h, std::string_view name) const {
  for (const auto& rt : h.room_types) {
    if (rt.name == name) return &rt;
  }
  return nullptr;
}

int Reservations::free_rooms(const Hotel& h, const RoomType& rt, const Stay& stay) const {
  const auto occ = occupancy_.find(TypeKey{h.id, rt.name});
  int worst = 0;
  if (occ != occupancy_.end()) {
    for (auto it = occ->second.lower_bound(stay.check_in);
         it != occ->second.end() && it->first < stay.check_out; ++it) {
      worst = std::max(worst, it->second);
    }
  }
  return rt.count - worst;
}

void Reservations::occupy(const Booking& b) {
  auto& nights = occupancy_[TypeKey{b.hotel_id, b.room_type}];
  for (Date d = b.stay.check_in; d < b.stay.check_out; d += std::chrono::days{1}) {
    nights[d] += b.rooms;
  }
}

void Reservations::release(const Booking& b) {
  auto& nights = occupancy_[TypeKey{b.hotel_id, b.room_type}];
  for (Date d = b.stay.check_in; d < b.stay.check_out; d += std::chrono::days{1}) {
    auto it = nights.find(d);
    if (it == nights.end() || it->second < b.rooms) {
      fail(ErrorCode::Internal, "occupancy underflow releasing " + b.id);
    }
    if ((it->second -= b.rooms) == 0) nights.erase(it);
  }
}

std::string Reservations::upsert_hotel(Hotel hotel) {
  validate(hotel);
  std::unique_lock lock(mu_);
  if (auto old = hotels_.find(hotel.id); old != hotels_.end()) {
    for (const auto& prev : old->second.room_types) {
      const auto occ = occupancy_.find(TypeKey{hotel.id, prev.name});
      if (occ == occupancy_.end() || occ->second.empty()) continue;
      int peak = 0;
      for (const auto& [night, rooms] : occ->second) peak = std::max(peak, rooms);
      const auto* next = find_type(hotel, prev.name);
      const int new_count = next ? next->count : 0;
      if (new_count < peak) {
        fail(ErrorCode::CapacityConflict,
             "room type '" + prev.name + "' has " + std::to_string(peak) +
                 " rooms booked on some night; cannot reduce to " + std::to_string(new_count));
      }
    }
  }
  std::string id = hotel.id;
  hotels_.insert_or_assign(id, std::move(hotel));
  return id;
}

Hotel Reservations::get_hotel(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = hotels_.find(id);
  if (it == hotels_.end()) fail(ErrorCode::NotFound, "no hotel with id " + std::string(id));
  return it->second;
}

std::vector<Hotel> Reservations::list_hotels() const {
  std::shared_lock lock(mu_);
  std::vector<Hotel> out;
  for (const auto& [id, h] : hotels_) out.push_back(h);
  return out;
}

std::vector<Availability> Reservations::search_availability(const std::optional<NearFilter>& near,
                                                            const Stay& stay, int rooms) const {
  validate_request(stay, rooms);
  if (near) {
    if (!(near->radius_m > 0.0)) fail(ErrorCode::Validation, "radius must be positive");
    geo::validate(near->origin, "near");
  }

  std::shared_lock lock(mu_);
  std::set<std::string, std::less<>> in_range;
  if (near) {
    std::vector<geo::SpatialIndex::Entry> points;
    for (const auto& [id, h] : hotels_) points.emplace_back(id, h.location);
    const auto index = geo::SpatialIndex::build(std::move(points));
    for (auto& hit : index.within_radius(near->origin, near->radius_m)) in_range.insert(hit.key);
  }

  std::vector<Availability> out;
  for (const auto& [id, h] : hotels_) {
    if (near && !in_range.contains(id)) continue;
    for (const auto& rt : h.room_types) {
      const int free = free_rooms(h, rt, stay);
      if (free >= rooms) out.push_back({id, rt.name, free, rt.nightly_rate});
    }
  }
  std::sort(out.begin(), out.end(), [](const Availability& a, const Availability& b) {
    return std::tie(a.nightly_rate, a.hotel_id, a.room_type) <
           std::tie(b.nightly_rate, b.hotel_id, b.room_type);
  });
  return out;
}

Booking Reservations::hold_booking(std::string_view guest_id, std::string_view hotel_id,
                                   std::string_view room_type, const Stay& stay, int rooms,
                                   Timestamp now) {
  validate_request(stay, rooms);
  if (guest_id.empty()) fail(ErrorCode::Validation, "guest id must not be empty");

  std::unique_lock lock(mu_);
  auto h = hotels_.find(hotel_id);
  if (h == hotels_.end()) fail(ErrorCode::NotFound, "no hotel with id " + std::string(hotel_id));
  const auto* rt = find_type(h->second, room_type);
  if (!rt) {
    fail(ErrorCode::NotFound, "hotel " + std::string(hotel_id) + " has no room type " +
                                  std::string(room_type));
  }
  const int free = free_rooms(h->second, *rt, stay);
  if (free < rooms) {
    fail(ErrorCode::NoAvailability, "only " + std::to_string(std::max(free, 0)) +
                                        " rooms free for the requested stay");
  }

  char id[32];
  std::snprintf(id, sizeof id, "bk-%08llu", static_cast<unsigned long long>(next_booking_++));
  Booking b{id,   std::string(guest_id), std::string(hotel_id), std::string(room_type), stay,
            rooms, BookingState::Held,   now + hold_ttl_};
  occupy(b);
  bookings_.emplace(b.id, b);
  return b;
}

Booking Reservations::confirm_booking(std::string_view booking_id, Timestamp now) {
  std::unique_lock lock(mu_);
  auto it = bookings_.find(booking_id);
  if (it == bookings_.end()) fail(ErrorCode::NotFound, "no booking with id " + std::string(booking_id));
  Booking& b = it->second;
  if (b.state != BookingState::Held) {
    fail(ErrorCode::InvalidState, "booking " + b.id + " is " + std::string(to_string(b.state)) +
                                      ", not held");
  }
  if (now >= *b.hold_expires_at) {
    release(b);
    b.state = BookingState::Expired;
    b.hold_expires_at.reset();
    fail(ErrorCode::HoldExpired, "hold on booking " + b.id + " has expired");
  }
  b.state = BookingState::Confirmed;
  b.hold_expires_at.reset();
  return b;
}

Booking Reservations::cancel_booking(std::string_view booking_id) {
  std::unique_lock lock(mu_);
  auto it = bookings_.find(booking_id);
  if (it == bookings_.end()) fail(ErrorCode::NotFound, "no booking with id " + std::string(booking_id));
  Booking& b = it->second;
  if (!b.active()) {
    fail(ErrorCode::InvalidState, "booking " + b.id + " is already " +
                                      std::string(to_string(b.state)));
  }
  release(b);
  b.state = BookingState::Cancelled;
  b.hold_expires_at.reset();
  return b;
}

std::size_t Reservations::expire_holds(Timestamp now) {
  std::unique_lock lock(mu_);
  std::size_t expired = 0;
  for (auto& [id, b] : bookings_) {
    if (b.state == BookingState::Held && *b.hold_expires_at <= now) {
      release(b);
      b.state = BookingState::Expired;
      b.hold_expires_at.reset();
      ++expired;
    }
  }
  return expired;
}

Booking Reservations::get_booking(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = bookings_.find(id);
  if (it == bookings_.end()) fail(ErrorCode::NotFound, "no booking with id " + std::string(id));
  return it->second;
}

std::vector<Booking> Reservations::list_bookings() const {
  std::shared_lock lock(mu_);
  std::vector<Booking> out;
  for (const auto& [id, b] : bookings_) out.push_back(b);
  return out;
}

int Reservations::occupied(std::string_view hotel_id, std::string_view room_type, Date night) const {
  std::shared_lock lock(mu_);
  auto occ = occupancy_.find(TypeKey{std::string(hotel_id), std::string(room_type)});
  if (occ == occupancy_.end()) return 0;
  auto it = occ->second.find(night);
  return it == occ->second.end() ? 0 : it->second;
}

void Reservations::check_invariants() const {
  std::shared_lock lock(mu_);
  std::map<TypeKey, std::map<Date, int>> recount;
  for (const auto& [id, b] : bookings_) {
    if (b.hold_expires_at.has_value() != (b.state == BookingState::Held)) {
      fail(ErrorCode::Internal, "booking " + id + ": hold_expires_at present iff held violated");
    }
    if (!(b.stay.check_in < b.stay.check_out)) fail(ErrorCode::Internal, "booking " + id + ": bad stay");
    if (!b.active()) continue;
    for (Date d = b.stay.check_in; d < b.stay.check_out; d += std::chrono::days{1}) {
      recount[TypeKey{b.hotel_id, b.room_type}][d] += b.rooms;
    }
  }
  std::erase_if(recount, [](const auto& kv) { return kv.second.empty(); });
  auto maintained = occupancy_;
  std::erase_if(maintained, [](const auto& kv) { return kv.second.empty(); });
  if (recount != maintained) fail(ErrorCode::Internal, "occupancy counters out of sync");
  for (const auto& [key, nights] : recount) {
    const auto h = hotels_.find(std::get<0>(key));
    const RoomType* rt = h == hotels_.end() ? nullptr : find_type(h->second, std::get<1>(key));
    const int count = rt ? rt->count : 0;
    for (const auto& [night, rooms] : nights) {
      if (rooms > count) {
        fail(ErrorCode::Internal, "overbooked " + std::get<0>(key) + "/" + std::get<1>(key) +
                                      " on " + format_date(night));
      }
    }
  }
}

Reservations::State Reservations::export_state() const {
  std::shared_lock lock(mu_);
  State s;
  for (const auto& [id, h] : hotels_) s.hotels.push_back(h);
  for (const auto& [id, b] : bookings_) s.bookings.push_back(b);
  s.next_booking = next_booking_;
  return s;
}

void Reservations::import_state(State state) {
  std::unique_lock lock(mu_);
  hotels_.clear();
  bookings_.clear();
  occupancy_.clear();
  auto corrupt = [](const std::string& why) { fail(ErrorCode::CorruptSnapshot, why); };
  try {
    for (auto& h : state.hotels) {
      validate(h);
      std::string id = h.id;
      if (!hotels_.emplace(std::move(id), std::move(h)).second) corrupt("duplicate hotel");
    }
    for (auto& b : state.bookings) {
      if (b.active()) occupy(b);
      std::string id = b.id;
      if (!bookings_.emplace(std::move(id), std::move(b)).second) corrupt("duplicate booking");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptSnapshot) throw;
    corrupt(e.what());
  }
  next_booking_ = state.next_booking;
  lock.unlock();
  try {
    check_invariants();
  } catch (const Error& e) {
    corrupt(e.what());
  }
}

void Reservations::clear() {
  std::unique_lock lock(mu_);
  hotels_.clear();
  bookings_.clear();
  occupancy_.clear();
  next_booking_ = 1;
}

}  // namespace dms::reservations
