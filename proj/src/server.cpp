#include "dms/server.hpp"

#include <chrono>

#include "httplib.h"

namespace dms {

namespace {

api::Request to_request(const httplib::Request& r) {
  api::Request out;
  out.method = r.method;
  out.target = r.target;
  for (const auto& [k, v] : r.headers) out.headers.emplace(k, v);
  out.body = r.body;
  return out;
}

}  // namespace

Service::Service(std::unique_ptr<App> app)
    : app_(std::move(app)), router_(*app_), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = router_.handle(to_request(req));
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  // SO_REUSEADDR without the library's default SO_REUSEPORT.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  const char* pattern = "/.*";
  server_->Get(pattern, handler);
  server_->Post(pattern, handler);
  server_->Put(pattern, handler);
  server_->Patch(pattern, handler);
  server_->Delete(pattern, handler);

  const auto& cfg = app_->config();
  if (cfg.port == 0) {
    port_ = server_->bind_to_any_port(cfg.host);
    if (port_ <= 0) fail(ErrorCode::AddressInUse, "cannot bind " + cfg.host);
  } else {
    if (!server_->bind_to_port(cfg.host, cfg.port)) {
      fail(ErrorCode::AddressInUse, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
    }
    port_ = cfg.port;
  }
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  expiry_ = std::thread([this] { expiry_loop(); });
  server_->wait_until_ready();
}

Service::~Service() { stop(); }

void Service::expiry_loop() {
  std::unique_lock lock(mu_);
  while (!stopping_) {
    if (cv_.wait_for(lock, app_->config().expiry_interval, [this] { return stopping_; })) break;
    lock.unlock();
    try {
      app_->expire_holds();
    } catch (const std::exception&) {
      // a failed commit leaves the app read-only; keep serving reads
    }
    lock.lock();
  }
}

void Service::wait() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return stopping_; });
}

void Service::stop() {
  {
    std::lock_guard lock(mu_);
    if (stopping_ && !listener_.joinable()) return;
    stopping_ = true;
  }
  cv_.notify_all();
  server_->stop();
  if (listener_.joinable()) listener_.join();
  if (expiry_.joinable()) expiry_.join();
}

std::unique_ptr<Service> start_service(const ServiceConfig& config) {
  validate(config);
  return std::make_unique<Service>(App::open(config));
}

}  // namespace dms
