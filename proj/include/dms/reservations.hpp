#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "dms/geo.hpp"
#include "dms/time.hpp"

namespace dms::reservations {

struct RoomType {
  std::string name;
  int capacity = 1;             // persons per room
  int count = 0;                // rooms of this type
  std::int64_t nightly_rate = 0;  // currency minor units

  friend bool operator==(const RoomType&, const RoomType&) = default;
};

struct Hotel {
  std::string id;
  std::string name;
  geo::GeoPoint location;
  std::optional<std::string> destination_id;
  std::vector<RoomType> room_types;

  friend bool operator==(const Hotel&, const Hotel&) = default;
};

/// Half-open stay [check_in, check_out): the guest occupies the nights
/// check_in .. check_out - 1.
struct Stay {
  Date check_in;
  Date check_out;

  [[nodiscard]] int nights() const noexcept {
    return static_cast<int>((check_out - check_in).count());
  }
  friend bool operator==(const Stay&, const Stay&) = default;
};

/// Longest stay accepted by any operation.
inline constexpr int kMaxStayNights = 730;

enum class BookingState { Held, Confirmed, Cancelled, Expired };

[[nodiscard]] std::string_view to_string(BookingState s) noexcept;
[[nodiscard]] BookingState parse_booking_state(std::string_view text);

/// True for the edges held->{confirmed,cancelled,expired} and confirmed->cancelled.
[[nodiscard]] bool transition_allowed(BookingState from, BookingState to) noexcept;

struct Booking {
  std::string id;
  std::string guest_id;
  std::string hotel_id;
  std::string room_type;
  Stay stay;
  int rooms = 1;
  BookingState state = BookingState::Held;
  std::optional<Timestamp> hold_expires_at;  // present iff state == Held

  [[nodiscard]] bool active() const noexcept {
    return state == BookingState::Held || state == BookingState::Confirmed;
  }
  friend bool operator==(const Booking&, const Booking&) = default;
};

struct Availability {
  std::string hotel_id;
  std::string room_type;
  int available = 0;  // minimum free rooms over the stay
  std::int64_t nightly_rate = 0;

  friend bool operator==(const Availability&, const Availability&) = default;
};

struct NearFilter {
  geo::GeoPoint origin;
  double radius_m = 0.0;
};

inline const std::vector<std::string> kHotelCsvHeader = {
    "hotel_id", "name",     "lat",   "lon",
    "destination_id", "room_type", "capacity", "count", "nightly_rate_minor"};

/// Groups hotel inventory CSV rows by hotel_id (first-seen order). Throws
/// Format on a bad header or unparseable row and Validation on invalid data.
[[nodiscard]] std::vector<Hotel> parse_hotels_csv(std::string_view csv_text);

/// Throws Validation on a bad stay (ordering, length) or room count.
void validate_request(const Stay& stay, int rooms);
/// Throws Validation if the hotel violates its field invariants.
void validate(const Hotel& hotel);

/// Hotel inventory and bookings. Every mutation is linearizable and the
/// check-and-reserve in hold_booking is atomic, so per night the rooms in
/// held or confirmed bookings never exceed a room type's count.
class Reservations {
 public:
  explicit Reservations(std::chrono::seconds hold_ttl = std::chrono::seconds{900});
  Reservations(const Reservations&) = delete;
  Reservations& operator=(const Reservations&) = delete;

  [[nodiscard]] std::chrono::seconds hold_ttl() const noexcept { return hold_ttl_; }

  /// Throws Validation or CapacityConflict.
  std::string upsert_hotel(Hotel hotel);
  /// Throws NotFound.
  [[nodiscard]] Hotel get_hotel(std::string_view id) const;
  /// Ascending by id.
  [[nodiscard]] std::vector<Hotel> list_hotels() const;

  /// Ordered by (nightly_rate, hotel_id, room_type).
  [[nodiscard]] std::vector<Availability> search_availability(const std::optional<NearFilter>& near,
                                                              const Stay& stay, int rooms) const;

  /// Throws NoAvailability, NotFound or Validation.
  Booking hold_booking(std::string_view guest_id, std::string_view hotel_id,
                       std::string_view room_type, const Stay& stay, int rooms, Timestamp now);

  /// Throws NotFound, InvalidState or HoldExpired. A late confirm still
  /// moves the booking to expired before throwing.
  Booking confirm_booking(std::string_view booking_id, Timestamp now);

  /// Throws NotFound or InvalidState.
  Booking cancel_booking(std::string_view booking_id);

  /// Expires every hold with hold_expires_at <= now; returns how many.
  std::size_t expire_holds(Timestamp now);

  /// Throws NotFound.
  [[nodiscard]] Booking get_booking(std::string_view id) const;
  /// Ascending by id.
  [[nodiscard]] std::vector<Booking> list_bookings() const;

  /// Rooms of the type in held or confirmed bookings covering `night`.
  [[nodiscard]] int occupied(std::string_view hotel_id, std::string_view room_type,
                             Date night) const;

  /// Recounts occupancy from the booking table and throws Internal if it
  /// disagrees with the maintained counters or exceeds any count.
  void check_invariants() const;

  struct State {
    std::vector<Hotel> hotels;
    std::vector<Booking> bookings;
    std::uint64_t next_booking = 1;
  };
  /// Consistent copy of everything, for snapshots.
  [[nodiscard]] State export_state() const;
  /// Replaces all contents; throws CorruptSnapshot if `state` breaks an invariant.
  void import_state(State state);

  void clear();

 private:
  using TypeKey = std::tuple<std::string, std::string>;

  const RoomType* find_type(const Hotel& h, std::string_view name) const;
  int free_rooms(const Hotel& h, const RoomType& rt, const Stay& stay) const;
  void release(const Booking& b);
  void occupy(const Booking& b);

  std::chrono::seconds hold_ttl_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Hotel, std::less<>> hotels_;
  std::map<std::string, Booking, std::less<>> bookings_;
  std::map<TypeKey, std::map<Date, int>> occupancy_;
  std::uint64_t next_booking_ = 1;
};

}  // namespace dms::reservations
