// dms: command-line entry point for the destination management service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dms/app.hpp"
#include "dms/config.hpp"
#include "dms/server.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) dms::fail(dms::ErrorCode::Io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

dms::ServiceConfig load(const std::string& explicit_path) {
  std::optional<std::filesystem::path> p;
  if (!explicit_path.empty()) p = explicit_path;
  if (auto resolved = dms::resolve_config_path(p)) return dms::load_config(*resolved);
  dms::ServiceConfig cfg;
  dms::validate(cfg);
  return cfg;
}

int serve(const dms::ServiceConfig& cfg) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);  // inherited by service threads

  auto service = dms::start_service(cfg);
  std::cout << "listening on " << cfg.host << ":" << service->port() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  std::cout << "shutting down" << std::endl;
  service->stop();
  service->app().compact();
  return 0;
}

int ingest(const dms::ServiceConfig& cfg, const std::string& destinations, const std::string& nodes,
           const std::string& edges, const std::string& hotels) {
  if (nodes.empty() != edges.empty()) {
    dms::fail(dms::ErrorCode::Validation, "--nodes and --edges must be given together");
  }
  auto app = dms::App::open(cfg);
  int rejected = 0;
  if (!destinations.empty()) {
    const auto r = app->ingest_destinations(slurp(destinations));
    std::cout << "destinations: " << r.accepted << " accepted, " << r.rejected << " rejected\n";
    for (const auto& e : r.errors) std::cerr << destinations << ":" << e.line << ": " << e.reason << "\n";
    rejected += static_cast<int>(r.rejected);
  }
  if (!nodes.empty()) {
    const auto r = app->ingest_graph(slurp(nodes), slurp(edges));
    std::cout << "graph: " << r.graph.node_count() << " nodes, " << r.graph.edge_count()
              << " edges, " << r.rejected.size() << " rows rejected\n";
    for (const auto& d : r.rejected) std::cerr << d.file << ":" << d.line << ": " << d.reason << "\n";
    rejected += static_cast<int>(r.rejected.size());
  }
  if (!hotels.empty()) {
    const auto r = app->ingest_hotels(slurp(hotels));
    std::cout << "hotels: " << r.accepted << " accepted, " << r.errors.size() << " rejected\n";
    for (const auto& e : r.errors) std::cerr << hotels << ": " << e << "\n";
    rejected += static_cast<int>(r.errors.size());
  }
  app->compact();
  return rejected == 0 ? 0 : 2;
}

int create_user(const dms::ServiceConfig& cfg, const std::string& username, const std::string& role,
                std::optional<std::string> password) {
  if (!password) {
    std::string line;
    if (!std::getline(std::cin, line)) dms::fail(dms::ErrorCode::Validation, "no password on stdin");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    password = line;
  }
  auto app = dms::App::open(cfg);
  const auto account = app->register_user(username, *password, dms::identity::parse_role(role));
  std::cout << account.id << " " << account.username << " "
            << dms::identity::to_string(account.role) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Destination management service"};
  cli.require_subcommand(1);
  cli.fallthrough();
  std::string config_path;
  cli.add_option("-c,--config", config_path, "JSON config file (default: $DMS_CONFIG)");

  auto* serve_cmd = cli.add_subcommand("serve", "Run the HTTP API");

  auto* ingest_cmd = cli.add_subcommand("ingest", "Load CSV data into the store");
  std::string destinations, nodes, edges, hotels;
  ingest_cmd->add_option("--destinations", destinations, "destinations CSV");
  ingest_cmd->add_option("--nodes", nodes, "road nodes CSV");
  ingest_cmd->add_option("--edges", edges, "road edges CSV");
  ingest_cmd->add_option("--hotels", hotels, "hotels CSV");

  auto* admin_cmd = cli.add_subcommand("admin", "Account administration");
  admin_cmd->require_subcommand(1);
  admin_cmd->fallthrough();
  auto* create_cmd = admin_cmd->add_subcommand("create-user", "Create an account of any role");
  std::string username, role = "admin";
  std::optional<std::string> password;
  create_cmd->add_option("--username", username)->required();
  create_cmd->add_option("--role", role)->check(
      CLI::IsMember({"tourist", "local", "site_manager", "admin"}));
  create_cmd->add_option("--password", password, "read from stdin when omitted");

  CLI11_PARSE(cli, argc, argv);

  try {
    const auto cfg = load(config_path);
    if (serve_cmd->parsed()) return serve(cfg);
    if (ingest_cmd->parsed()) return ingest(cfg, destinations, nodes, edges, hotels);
    if (create_cmd->parsed()) return create_user(cfg, username, role, password);
  } catch (const dms::Error& e) {
    std::cerr << "error: " << dms::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
