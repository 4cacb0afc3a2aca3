#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dms/catalog.hpp"
#include "dms/community.hpp"
#include "dms/config.hpp"
#include "dms/identity.hpp"
#include "dms/json_codec.hpp"
#include "dms/random.hpp"
#include "dms/reservations.hpp"
#include "dms/routing.hpp"
#include "dms/storage.hpp"

namespace dms {

using Clock = std::function<Timestamp()>;

struct HotelIngestReport {
  std::size_t accepted = 0;
  std::vector<std::string> errors;
};

/// All module state plus its persistence.
///
/// Every mutation runs under one writer lock, is applied to the in-memory
/// modules, then committed to the storage backend as a journal event that
/// carries any generated values (ids, salts, tokens) so replay reproduces
/// the same state. Reads go straight to the thread-safe modules.
class App {
 public:
  /// Recovers prior state from `backend`. Throws Config, Io or CorruptSnapshot.
  App(ServiceConfig config, std::unique_ptr<storage::StorageBackend> backend,
      std::shared_ptr<RandomSource> rng, Clock clock);
  ~App();
  App(const App&) = delete;
  App& operator=(const App&) = delete;

  /// Opens the backend named by the config with system randomness and clock.
  static std::unique_ptr<App> open(const ServiceConfig& config);

  [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }
  [[nodiscard]] Timestamp now() const { return clock_(); }
  [[nodiscard]] storage::BackendKind backend_kind() const noexcept { return backend_->kind(); }

  // Read access.
  [[nodiscard]] const catalog::Catalog& catalog() const noexcept { return catalog_; }
  [[nodiscard]] const reservations::Reservations& reservations() const noexcept { return reservations_; }
  [[nodiscard]] const identity::Identity& identity() const noexcept { return identity_; }
  [[nodiscard]] const community::Community& community() const noexcept { return community_; }
  /// The current road graph; a later replace does not affect a held pointer.
  [[nodiscard]] std::shared_ptr<const routing::RoadGraph> graph() const;

  // Catalog.
  std::string add_destination(catalog::Destination dest);
  catalog::IngestReport ingest_destinations(std::string_view csv_text);

  // Road map.
  void replace_graph(routing::RoadGraph graph);
  routing::LoadResult ingest_graph(std::string_view nodes_csv, std::string_view edges_csv);

  // Hotels and bookings.
  std::string upsert_hotel(reservations::Hotel hotel);
  HotelIngestReport ingest_hotels(std::string_view csv_text);
  reservations::Booking hold_booking(std::string_view guest_id, std::string_view hotel_id,
                                     std::string_view room_type, const reservations::Stay& stay,
                                     int rooms);
  reservations::Booking confirm_booking(std::string_view booking_id);
  reservations::Booking cancel_booking(std::string_view booking_id);
  std::size_t expire_holds();

  // Accounts and community.
  identity::UserAccount register_user(std::string_view username, std::string_view password,
                                      identity::Role role);
  identity::Session login(std::string_view username, std::string_view password);
  void logout(std::string_view token);
  [[nodiscard]] identity::UserAccount authenticate(std::string_view token) const;
  community::Thread create_thread(std::string_view token, std::string_view destination_id,
                                  std::string_view title);
  community::Post post_reply(std::string_view token, std::string_view thread_id,
                             std::string_view body);
  community::Post delete_post(std::string_view token, std::string_view post_id);

  /// Full point-in-time state as JSON (identical for state-equivalent apps).
  [[nodiscard]] Json export_state() const;
  /// Replaces all state. Throws CorruptSnapshot on an inconsistent document.
  void import_state(const Json& state);

  /// Snapshot artifact of the current state.
  [[nodiscard]] std::string snapshot() const;
  /// Replaces state from an artifact. Throws CorruptSnapshot.
  void restore(std::string_view artifact);
  /// Writes a snapshot through the backend and compacts its journal.
  void compact();

  /// Throws Internal if any cross-module or per-module invariant fails.
  void check_invariants() const;

  [[nodiscard]] std::uint64_t committed_seq() const;

 private:
  void commit(Json event);
  void apply(const Json& event);
  void require_writable() const;
  [[nodiscard]] Json export_locked() const;

  ServiceConfig config_;
  std::unique_ptr<storage::StorageBackend> backend_;
  std::shared_ptr<RandomSource> rng_;
  Clock clock_;

  catalog::Catalog catalog_;
  reservations::Reservations reservations_;
  identity::Identity identity_;
  community::Community community_;

  mutable std::mutex graph_mu_;
  std::shared_ptr<const routing::RoadGraph> graph_;

  mutable std::mutex write_mu_;
  std::uint64_t seq_ = 0;
  bool failed_ = false;  // set when a commit could not be persisted
};

}  // namespace dms
