#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dms/geo.hpp"

namespace dms::routing {

enum class Mode { Walk, Drive };
enum class Metric { Distance, Time };

[[nodiscard]] std::string_view to_string(Mode m) noexcept;
[[nodiscard]] std::string_view to_string(Metric m) noexcept;
/// "walk" / "drive"; throws Validation otherwise.
[[nodiscard]] Mode parse_mode(std::string_view text);
/// "distance" / "time"; throws Validation otherwise.
[[nodiscard]] Metric parse_metric(std::string_view text);

/// Travel speeds in km/h. Both must be positive.
struct Speeds {
  double walk_kmh = 5.0;
  double drive_kmh = 40.0;

  [[nodiscard]] double meters_per_second(Mode m) const noexcept {
    return (m == Mode::Walk ? walk_kmh : drive_kmh) / 3.6;
  }
  [[nodiscard]] double fastest_meters_per_second() const noexcept {
    return (walk_kmh > drive_kmh ? walk_kmh : drive_kmh) / 3.6;
  }
};

struct Node {
  std::string id;
  geo::GeoPoint location;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::string from;
  std::string to;
  double length_m = 0.0;
  Mode mode = Mode::Walk;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed weighted road graph. Immutable once built.
///
/// Every edge has length > 0 and length >= the haversine distance between its
/// endpoints, which keeps the straight-line A* heuristic admissible.
class RoadGraph {
 public:
  struct OutEdge {
    std::size_t to = 0;
    double length_m = 0.0;
    Mode mode = Mode::Walk;
  };

  RoadGraph() = default;

  /// Throws DuplicateKey (node ids), Validation (coordinates, edge length) or
  /// DanglingEdge.
  static RoadGraph build(std::vector<Node> nodes, std::vector<Edge> edges);

  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
  [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }

  /// Nodes ascending by id; a node's position here is its index.
  [[nodiscard]] std::span<const Node> nodes() const noexcept { return nodes_; }
  /// Edges in insertion order.
  [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }

  /// Index of the node, or npos.
  [[nodiscard]] std::size_t find(std::string_view id) const noexcept;
  /// Throws NotFound.
  [[nodiscard]] std::size_t index_of(std::string_view id) const;
  [[nodiscard]] const Node& node(std::size_t index) const { return nodes_.at(index); }

  /// Out-edges ascending by (length, target id).
  [[nodiscard]] std::span<const OutEdge> out_edges(std::size_t index) const {
    return adjacency_.at(index);
  }

  [[nodiscard]] const geo::SpatialIndex& node_index() const noexcept { return node_index_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<OutEdge>> adjacency_;
  geo::SpatialIndex node_index_;
};

struct LoadDiagnostic {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct LoadResult {
  RoadGraph graph;
  std::vector<LoadDiagnostic> rejected;  // edge rows dropped at load
};

inline const std::vector<std::string> kNodeCsvHeader = {"id", "lat", "lon"};
inline const std::vector<std::string> kEdgeCsvHeader = {"from", "to", "length_m", "mode",
                                                        "bidirectional"};

/// Parses node and edge CSV text. Malformed node rows and unknown edge
/// endpoints are fatal (Format / DanglingEdge); edge rows that are shorter
/// than the straight-line distance, non-positive or unparseable are dropped
/// and reported.
[[nodiscard]] LoadResult load_graph_csv(std::string_view nodes_csv, std::string_view edges_csv);
/// As above, reading files; throws Io when either cannot be read.
[[nodiscard]] LoadResult load_graph(const std::filesystem::path& nodes_file,
                                    const std::filesystem::path& edges_file);

struct Adjacent {
  std::string node;
  double meters = 0.0;
  Mode mode = Mode::Walk;

  friend bool operator==(const Adjacent&, const Adjacent&) = default;
};

/// Out-edges of `node` ascending by (meters, node id). Throws NotFound.
[[nodiscard]] std::vector<Adjacent> adjacent(const RoadGraph& graph, std::string_view node);

struct Segment {
  std::string from;
  std::string to;
  double length_m = 0.0;
  Mode mode = Mode::Walk;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Route {
  std::vector<std::string> nodes;
  std::vector<Segment> segments;  // segments[i] joins nodes[i] and nodes[i+1]
  double total_length_m = 0.0;
  double est_time_s = 0.0;
  Metric metric = Metric::Distance;

  /// The optimized quantity: meters or seconds depending on `metric`.
  [[nodiscard]] double cost() const noexcept {
    return metric == Metric::Distance ? total_length_m : est_time_s;
  }
};

enum class Search { Dijkstra, AStar };

/// Minimum-cost route. Among equal-cost relaxations the predecessor with the
/// smaller node id wins. Throws NotFound or Unreachable.
[[nodiscard]] Route shortest_route(const RoadGraph& graph, std::string_view src,
                                   std::string_view dst, Metric metric,
                                   const Speeds& speeds = {}, Search search = Search::Dijkstra);

/// Node nearest to `p`, ties broken by smaller id. Throws EmptyGraph.
[[nodiscard]] std::string snap_to_graph(const RoadGraph& graph, const geo::GeoPoint& p);

/// Concatenates the shortest legs between consecutive waypoints in the given
/// order. Throws Validation (< 2 waypoints), NotFound or Unreachable.
[[nodiscard]] Route plan_tour(const RoadGraph& graph, std::span<const std::string> waypoints,
                              Metric metric, const Speeds& speeds = {});

/// Throws Internal if the route is not a well-formed walk over `graph` whose
/// totals match its segments (within `rel_tol`).
void check_route(const RoadGraph& graph, const Route& route, const Speeds& speeds,
                 double rel_tol = 1e-9);

}  // namespace dms::routing
