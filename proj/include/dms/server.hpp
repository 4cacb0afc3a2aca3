#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "dms/api.hpp"
#include "dms/app.hpp"

namespace httplib {
class Server;
}

namespace dms {

/// A running HTTP service: listener thread plus periodic hold expiry.
class Service {
 public:
  /// Takes ownership of the app and binds config().host:port. Throws
  /// AddressInUse when the socket cannot be bound.
  explicit Service(std::unique_ptr<App> app);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  [[nodiscard]] int port() const noexcept { return port_; }
  [[nodiscard]] App& app() noexcept { return *app_; }

  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  void expiry_loop();

  std::unique_ptr<App> app_;
  api::Router router_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
  std::thread listener_;
  std::thread expiry_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
};

/// Validates the config (before touching the network), opens the app and
/// starts serving.
[[nodiscard]] std::unique_ptr<Service> start_service(const ServiceConfig& config);

}  // namespace dms
