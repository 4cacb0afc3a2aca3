#include "dms/app.hpp"

#include "dms/error.hpp"

namespace dms {

namespace {

identity::IdentityOptions identity_options(const ServiceConfig& c) {
  return {c.session_ttl, c.hash_iterations};
}

Json stay_json(const reservations::Stay& s) { return s; }

}  // namespace

App::App(ServiceConfig config, std::unique_ptr<storage::StorageBackend> backend,
         std::shared_ptr<RandomSource> rng, Clock clock)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      rng_(std::move(rng)),
      clock_(std::move(clock)),
      reservations_((validate(config_), config_.hold_ttl)),
      identity_(rng_, identity_options(config_)),
      community_(catalog_, identity_),
      graph_(std::make_shared<routing::RoadGraph>()) {
  if (!backend_) fail(ErrorCode::Config, "no storage backend");
  if (!clock_) fail(ErrorCode::Config, "no clock");

  auto recovered = backend_->recover();
  if (recovered.state) import_state(*recovered.state);
  seq_ = recovered.snapshot_seq;
  for (const auto& entry : recovered.entries) {
    try {
      apply(entry.event);
    } catch (const Error& e) {
      fail(ErrorCode::CorruptSnapshot,
           "journal entry " + std::to_string(entry.seq) + " does not replay: " + e.what());
    }
    seq_ = entry.seq;
  }
}

App::~App() = default;

std::unique_ptr<App> App::open(const ServiceConfig& config) {
  validate(config);
  return std::make_unique<App>(config, storage::make_backend(config.backend, config.data_dir),
                               std::make_shared<SystemRandom>(), system_now);
}

std::shared_ptr<const routing::RoadGraph> App::graph() const {
  std::lock_guard lock(graph_mu_);
  return graph_;
}

void App::require_writable() const {
  if (failed_) fail(ErrorCode::Internal, "storage failed earlier; restart the service to recover");
}

void App::commit(Json event) {
  const std::uint64_t seq = seq_ + 1;
  try {
    backend_->append({seq, std::move(event)});
  } catch (const std::exception& e) {
    // Memory is now ahead of the journal; refuse further writes.
    failed_ = true;
    fail(ErrorCode::Internal, std::string("could not persist change: ") + e.what());
  }
  seq_ = seq;
}

std::uint64_t App::committed_seq() const {
  std::lock_guard lock(write_mu_);
  return seq_;
}

// Replays one committed event. Generated values come from the event itself.
void App::apply(const Json& event) {
  const auto type = field<std::string>(event, "type");
  if (type == "destination.add") {
    catalog_.add_destination(field<catalog::Destination>(event, "destination"));
  } else if (type == "destination.batch") {
    for (auto d : field<std::vector<catalog::Destination>>(event, "destinations")) {
      catalog_.add_destination(std::move(d));
    }
  } else if (type == "graph.replace") {
    auto g = routing::RoadGraph::build(field<std::vector<routing::Node>>(event, "nodes"),
                                       field<std::vector<routing::Edge>>(event, "edges"));
    std::lock_guard lock(graph_mu_);
    graph_ = std::make_shared<routing::RoadGraph>(std::move(g));
  } else if (type == "hotel.upsert") {
    reservations_.upsert_hotel(field<reservations::Hotel>(event, "hotel"));
  } else if (type == "booking.hold") {
    const auto b = reservations_.hold_booking(
        field<std::string>(event, "guest_id"), field<std::string>(event, "hotel_id"),
        field<std::string>(event, "room_type"), field<reservations::Stay>(event, "stay"),
        field<int>(event, "rooms"), from_unix(field<std::int64_t>(event, "now")));
    if (b.id != field<std::string>(event, "booking_id")) {
      fail(ErrorCode::Internal, "replayed hold produced " + b.id);
    }
  } else if (type == "booking.confirm") {
    try {
      reservations_.confirm_booking(field<std::string>(event, "booking_id"),
                                    from_unix(field<std::int64_t>(event, "now")));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HoldExpired) throw;
    }
  } else if (type == "booking.cancel") {
    reservations_.cancel_booking(field<std::string>(event, "booking_id"));
  } else if (type == "holds.expire") {
    reservations_.expire_holds(from_unix(field<std::int64_t>(event, "now")));
  } else if (type == "user.register") {
    identity_.insert_account(field<identity::UserAccount>(event, "account"));
  } else if (type == "session.login") {
    identity_.insert_session(field<identity::Session>(event, "session"));
  } else if (type == "session.logout") {
    identity_.logout(field<std::string>(event, "token"));
  } else if (type == "thread.create") {
    community_.insert_thread(field<community::Thread>(event, "thread"));
  } else if (type == "post.create") {
    community_.insert_post(field<community::Post>(event, "post"));
  } else if (type == "post.delete") {
    community_.remove_post(field<std::string>(event, "post_id"));
  } else {
    fail(ErrorCode::Validation, "unknown journal event type " + type);
  }
}

std::string App::add_destination(catalog::Destination dest) {
  std::lock_guard lock(write_mu_);
  require_writable();
  Json event{{"type", "destination.add"}, {"destination", dest}};
  auto id = catalog_.add_destination(std::move(dest));
  commit(std::move(event));
  return id;
}

catalog::IngestReport App::ingest_destinations(std::string_view csv_text) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto report = catalog_.ingest_csv(csv_text);
  if (report.accepted > 0) {
    Json batch = Json::array();
    for (const auto& id : report.accepted_ids) batch.push_back(catalog_.get_destination(id));
    commit({{"type", "destination.batch"}, {"destinations", std::move(batch)}});
  }
  return report;
}

void App::replace_graph(routing::RoadGraph graph) {
  std::lock_guard lock(write_mu_);
  require_writable();
  Json event{{"type", "graph.replace"},
             {"nodes", Json(std::vector<routing::Node>(graph.nodes().begin(), graph.nodes().end()))},
             {"edges", Json(std::vector<routing::Edge>(graph.edges().begin(), graph.edges().end()))}};
  {
    std::lock_guard glock(graph_mu_);
    graph_ = std::make_shared<routing::RoadGraph>(std::move(graph));
  }
  commit(std::move(event));
}

routing::LoadResult App::ingest_graph(std::string_view nodes_csv, std::string_view edges_csv) {
  auto result = routing::load_graph_csv(nodes_csv, edges_csv);
  replace_graph(result.graph);
  return result;
}

std::string App::upsert_hotel(reservations::Hotel hotel) {
  std::lock_guard lock(write_mu_);
  require_writable();
  if (hotel.destination_id && !catalog_.contains(*hotel.destination_id)) {
    fail(ErrorCode::Validation, "hotel references unknown destination " + *hotel.destination_id);
  }
  Json event{{"type", "hotel.upsert"}, {"hotel", hotel}};
  auto id = reservations_.upsert_hotel(std::move(hotel));
  commit(std::move(event));
  return id;
}

HotelIngestReport App::ingest_hotels(std::string_view csv_text) {
  HotelIngestReport report;
  for (auto& h : reservations::parse_hotels_csv(csv_text)) {
    const std::string id = h.id;
    try {
      upsert_hotel(std::move(h));
      ++report.accepted;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Internal) throw;
      report.errors.push_back(id + ": " + e.what());
    }
  }
  return report;
}

reservations::Booking App::hold_booking(std::string_view guest_id, std::string_view hotel_id,
                                        std::string_view room_type,
                                        const reservations::Stay& stay, int rooms) {
  std::lock_guard lock(write_mu_);
  require_writable();
  const auto now = clock_();
  auto b = reservations_.hold_booking(guest_id, hotel_id, room_type, stay, rooms, now);
  commit({{"type", "booking.hold"},
          {"guest_id", guest_id},
          {"hotel_id", hotel_id},
          {"room_type", room_type},
          {"stay", stay_json(stay)},
          {"rooms", rooms},
          {"now", to_unix(now)},
          {"booking_id", b.id}});
  return b;
}

reservations::Booking App::confirm_booking(std::string_view booking_id) {
  std::lock_guard lock(write_mu_);
  require_writable();
  const auto now = clock_();
  Json event{{"type", "booking.confirm"}, {"booking_id", booking_id}, {"now", to_unix(now)}};
  try {
    auto b = reservations_.confirm_booking(booking_id, now);
    commit(std::move(event));
    return b;
  } catch (const Error& e) {
    // A late confirm still expired the hold.
    if (e.code() == ErrorCode::HoldExpired) commit(std::move(event));
    throw;
  }
}

reservations::Booking App::cancel_booking(std::string_view booking_id) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto b = reservations_.cancel_booking(booking_id);
  commit({{"type", "booking.cancel"}, {"booking_id", booking_id}});
  return b;
}

std::size_t App::expire_holds() {
  std::lock_guard lock(write_mu_);
  require_writable();
  const auto now = clock_();
  const auto n = reservations_.expire_holds(now);
  if (n > 0) commit({{"type", "holds.expire"}, {"now", to_unix(now)}});
  return n;
}

identity::UserAccount App::register_user(std::string_view username, std::string_view password,
                                         identity::Role role) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto account = identity_.register_user(username, password, role);
  commit({{"type", "user.register"}, {"account", account}});
  return account;
}

identity::Session App::login(std::string_view username, std::string_view password) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto session = identity_.login(username, password, clock_());
  commit({{"type", "session.login"}, {"session", session}});
  return session;
}

void App::logout(std::string_view token) {
  std::lock_guard lock(write_mu_);
  require_writable();
  if (identity_.logout(token)) commit({{"type", "session.logout"}, {"token", token}});
}

identity::UserAccount App::authenticate(std::string_view token) const {
  return identity_.authenticate(token, clock_());
}

community::Thread App::create_thread(std::string_view token, std::string_view destination_id,
                                     std::string_view title) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto t = community_.create_thread(token, destination_id, title, clock_());
  commit({{"type", "thread.create"}, {"thread", t}});
  return t;
}

community::Post App::post_reply(std::string_view token, std::string_view thread_id,
                                std::string_view body) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto p = community_.post_reply(token, thread_id, body, clock_());
  commit({{"type", "post.create"}, {"post", p}});
  return p;
}

community::Post App::delete_post(std::string_view token, std::string_view post_id) {
  std::lock_guard lock(write_mu_);
  require_writable();
  auto p = community_.delete_post(token, post_id, clock_());
  commit({{"type", "post.delete"}, {"post_id", post_id}});
  return p;
}

Json App::export_state() const {
  std::lock_guard lock(write_mu_);
  return export_locked();
}

Json App::export_locked() const {
  const auto g = graph();
  const auto res = reservations_.export_state();
  const auto ids = identity_.export_state();
  const auto com = community_.export_state();
  return Json{
      {"version", 1},
      {"destinations", catalog_.list()},
      {"graph",
       {{"nodes", std::vector<routing::Node>(g->nodes().begin(), g->nodes().end())},
        {"edges", std::vector<routing::Edge>(g->edges().begin(), g->edges().end())}}},
      {"hotels", res.hotels},
      {"bookings", res.bookings},
      {"next_booking", res.next_booking},
      {"users", ids.users},
      {"sessions", ids.sessions},
      {"next_user", ids.next_user},
      {"threads", com.threads},
      {"posts", com.posts},
      {"next_thread", com.next_thread},
      {"next_post", com.next_post},
  };
}

void App::import_state(const Json& state) {
  try {
    if (field<int>(state, "version") != 1) fail(ErrorCode::Validation, "unsupported state version");
    const auto& g = field<Json>(state, "graph");
    auto graph = routing::RoadGraph::build(field<std::vector<routing::Node>>(g, "nodes"),
                                           field<std::vector<routing::Edge>>(g, "edges"));
    auto destinations = field<std::vector<catalog::Destination>>(state, "destinations");
    reservations::Reservations::State res{
        field<std::vector<reservations::Hotel>>(state, "hotels"),
        field<std::vector<reservations::Booking>>(state, "bookings"),
        field<std::uint64_t>(state, "next_booking")};
    identity::Identity::State ids{field<std::vector<identity::UserAccount>>(state, "users"),
                                  field<std::vector<identity::Session>>(state, "sessions"),
                                  field<std::uint64_t>(state, "next_user")};
    community::Community::State com{field<std::vector<community::Thread>>(state, "threads"),
                                    field<std::vector<community::Post>>(state, "posts"),
                                    field<std::uint64_t>(state, "next_thread"),
                                    field<std::uint64_t>(state, "next_post")};

    catalog_.clear();
    for (auto& d : destinations) catalog_.add_destination(std::move(d));
    {
      std::lock_guard lock(graph_mu_);
      graph_ = std::make_shared<routing::RoadGraph>(std::move(graph));
    }
    reservations_.import_state(std::move(res));
    identity_.import_state(std::move(ids));
    community_.import_state(std::move(com));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptSnapshot) throw;
    fail(ErrorCode::CorruptSnapshot, std::string("inconsistent state document: ") + e.what());
  }
}

std::string App::snapshot() const {
  std::lock_guard lock(write_mu_);
  return storage::encode_snapshot(seq_, export_locked());
}

void App::restore(std::string_view artifact) {
  const auto decoded = storage::decode_snapshot(artifact);
  std::lock_guard lock(write_mu_);
  require_writable();
  import_state(decoded.state);
  // Persist the restored image so a restart comes back to it.
  backend_->write_snapshot(seq_, decoded.state);
}

void App::compact() {
  std::lock_guard lock(write_mu_);
  require_writable();
  backend_->write_snapshot(seq_, export_locked());
}

void App::check_invariants() const {
  reservations_.check_invariants();
  community_.check_invariants();
  for (const auto& b : reservations_.list_bookings()) {
    if (!identity_.has_user(b.guest_id)) {
      fail(ErrorCode::Internal, "booking " + b.id + " belongs to unknown user " + b.guest_id);
    }
  }
  for (const auto& h : reservations_.list_hotels()) {
    if (h.destination_id && !catalog_.contains(*h.destination_id)) {
      fail(ErrorCode::Internal, "hotel " + h.id + " references unknown destination");
    }
  }
}

}  // namespace dms
