#include "dms/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <queue>
#include <unordered_map>

#include "dms/csv.hpp"
#include "dms/error.hpp"
#include "dms/text.hpp"

namespace dms::routing {

std::string_view to_string(Mode m) noexcept { return m == Mode::Walk ? "walk" : "drive"; }

std::string_view to_string(Metric m) noexcept {
  return m == Metric::Distance ? "distance" : "time";
}

Mode parse_mode(std::string_view text) {
  if (text == "walk") return Mode::Walk;
  if (text == "drive") return Mode::Drive;
  fail(ErrorCode::Validation, "mode must be walk or drive (got '" + std::string(text) + "')");
}

Metric parse_metric(std::string_view text) {
  if (text == "distance") return Metric::Distance;
  if (text == "time") return Metric::Time;
  fail(ErrorCode::Validation, "metric must be distance or time (got '" + std::string(text) + "')");
}

RoadGraph RoadGraph::build(std::vector<Node> nodes, std::vector<Edge> edges) {
  std::vector<geo::SpatialIndex::Entry> points;
  points.reserve(nodes.size());
  for (const auto& n : nodes) {
    if (n.id.empty()) fail(ErrorCode::Validation, "node id must not be empty");
    points.emplace_back(n.id, n.location);
  }
  RoadGraph g;
  g.node_index_ = geo::SpatialIndex::build(std::move(points));  // rejects duplicates

  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  g.nodes_ = std::move(nodes);
  g.adjacency_.resize(g.nodes_.size());

  for (const auto& e : edges) {
    const std::size_t from = g.find(e.from);
    const std::size_t to = g.find(e.to);
    if (from == npos || to == npos) {
      fail(ErrorCode::DanglingEdge, "edge " + e.from + "->" + e.to + " references unknown node " +
                                        (from == npos ? e.from : e.to));
    }
    if (!(e.length_m > 0.0) || !std::isfinite(e.length_m)) {
      fail(ErrorCode::Validation, "edge " + e.from + "->" + e.to + " must have positive length");
    }
    const double straight = geo::haversine_distance(g.nodes_[from].location, g.nodes_[to].location);
    if (e.length_m < straight) {
      fail(ErrorCode::Validation, "edge " + e.from + "->" + e.to + " is shorter than the " +
                                      std::to_string(straight) + " m straight-line distance");
    }
    g.adjacency_[from].push_back({to, e.length_m, e.mode});
  }
  for (auto& out : g.adjacency_) {
    std::stable_sort(out.begin(), out.end(), [](const OutEdge& a, const OutEdge& b) {
      if (a.length_m != b.length_m) return a.length_m < b.length_m;
      return a.to < b.to;
    });
  }
  g.edges_ = std::move(edges);
  return g;
}

std::size_t RoadGraph::find(std::string_view id) const noexcept {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, std::string_view key) { return n.id < key; });
  if (it == nodes_.end() || it->id != id) return npos;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t RoadGraph::index_of(std::string_view id) const {
  const auto i = find(id);
  if (i == npos) fail(ErrorCode::NotFound, "no map node with id " + std::string(id));
  return i;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

LoadResult load_graph_csv(std::string_view nodes_csv, std::string_view edges_csv) {
  const auto node_table = csv::parse(nodes_csv);
  csv::require_header(node_table, kNodeCsvHeader, "node file");
  const auto edge_table = csv::parse(edges_csv);
  csv::require_header(edge_table, kEdgeCsvHeader, "edge file");

  std::vector<Node> nodes;
  std::unordered_map<std::string, geo::GeoPoint> where;
  for (const auto& row : node_table.rows) {
    const auto at = "node file line " + std::to_string(row.line);
    if (row.fields.size() != 3) fail(ErrorCode::Format, at + ": expected 3 fields");
    const auto lat = text::parse_double(row.fields[1]);
    const auto lon = text::parse_double(row.fields[2]);
    if (!lat || !lon) fail(ErrorCode::Format, at + ": coordinates are not numbers");
    Node n{std::string(text::trim(row.fields[0])), {*lat, *lon}};
    if (!geo::is_valid(n.location)) fail(ErrorCode::Format, at + ": coordinate out of range");
    if (!where.emplace(n.id, n.location).second) {
      fail(ErrorCode::DuplicateKey, at + ": duplicate node id " + n.id);
    }
    nodes.push_back(std::move(n));
  }

  LoadResult result;
  std::vector<Edge> edges;
  for (const auto& row : edge_table.rows) {
    auto reject = [&](std::string reason) {
      result.rejected.push_back({"edges", row.line, std::move(reason)});
    };
    if (row.fields.size() != 5) {
      reject("expected 5 fields, found " + std::to_string(row.fields.size()));
      continue;
    }
    const std::string from(text::trim(row.fields[0]));
    const std::string to(text::trim(row.fields[1]));
    const auto from_it = where.find(from);
    const auto to_it = where.find(to);
    if (from_it == where.end() || to_it == where.end()) {
      fail(ErrorCode::DanglingEdge, "edge file line " + std::to_string(row.line) +
                                        ": unknown node " + (from_it == where.end() ? from : to));
    }
    const auto length = text::parse_double(row.fields[2]);
    if (!length || !std::isfinite(*length) || !(*length > 0.0)) {
      reject("length_m must be a positive number");
      continue;
    }
    Mode mode{};
    try {
      mode = parse_mode(text::trim(row.fields[3]));
    } catch (const Error& e) {
      reject(e.what());
      continue;
    }
    const auto bidir = text::trim(row.fields[4]);
    if (bidir != "true" && bidir != "false") {
      reject("bidirectional must be true or false");
      continue;
    }
    const double straight = geo::haversine_distance(from_it->second, to_it->second);
    if (*length < straight) {
      reject("length " + std::to_string(*length) + " m is shorter than straight-line distance " +
             std::to_string(straight) + " m between " + from + " and " + to);
      continue;
    }
    edges.push_back({from, to, *length, mode});
    if (bidir == "true") edges.push_back({to, from, *length, mode});
  }
  result.graph = RoadGraph::build(std::move(nodes), std::move(edges));
  return result;
}

LoadResult load_graph(const std::filesystem::path& nodes_file,
                      const std::filesystem::path& edges_file) {
  auto result = load_graph_csv(read_text(nodes_file), read_text(edges_file));
  for (auto& d : result.rejected) d.file = edges_file.string();
  return result;
}

std::vector<Adjacent> adjacent(const RoadGraph& graph, std::string_view node) {
  const auto from = graph.index_of(node);
  std::vector<Adjacent> out;
  for (const auto& e : graph.out_edges(from)) {
    out.push_back({graph.node(e.to).id, e.length_m, e.mode});
  }
  return out;
}

namespace {

struct Pred {
  std::size_t node = RoadGraph::npos;
  const RoadGraph::OutEdge* edge = nullptr;
};

double edge_cost(const RoadGraph::OutEdge& e, Metric metric, const Speeds& speeds) {
  return metric == Metric::Distance ? e.length_m : e.length_m / speeds.meters_per_second(e.mode);
}

void validate_speeds(const Speeds& speeds) {
  if (!(speeds.walk_kmh > 0.0) || !(speeds.drive_kmh > 0.0)) {
    fail(ErrorCode::Validation, "mode speeds must be positive");
  }
}

Route assemble(const RoadGraph& graph, std::size_t src, std::size_t dst,
               const std::vector<Pred>& pred, Metric metric, const Speeds& speeds) {
  std::vector<std::size_t> chain{dst};
  std::vector<const RoadGraph::OutEdge*> used;
  for (std::size_t v = dst; v != src;) {
    const auto& p = pred[v];
    if (p.node == RoadGraph::npos || chain.size() > graph.node_count()) {
      fail(ErrorCode::Internal, "broken predecessor chain");
    }
    used.push_back(p.edge);
    chain.push_back(p.node);
    v = p.node;
  }
  std::reverse(chain.begin(), chain.end());
  std::reverse(used.begin(), used.end());

  Route r;
  r.metric = metric;
  for (auto i : chain) r.nodes.push_back(graph.node(i).id);
  for (std::size_t i = 0; i < used.size(); ++i) {
    const auto& e = *used[i];
    r.segments.push_back({r.nodes[i], r.nodes[i + 1], e.length_m, e.mode});
    r.total_length_m += e.length_m;
    r.est_time_s += e.length_m / speeds.meters_per_second(e.mode);
  }
  return r;
}

using QueueItem = std::pair<double, std::size_t>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

std::vector<Pred> dijkstra(const RoadGraph& graph, std::size_t src, std::size_t dst,
                           Metric metric, const Speeds& speeds) {
  const auto n = graph.node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<Pred> pred(n);
  std::vector<bool> done(n, false);
  MinQueue open;
  dist[src] = 0.0;
  open.push({0.0, src});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == dst) break;
    for (const auto& e : graph.out_edges(u)) {
      const double nd = d + edge_cost(e, metric, speeds);
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        pred[e.to] = {u, &e};
        open.push({nd, e.to});
      } else if (nd == dist[e.to] && e.to != src && u < pred[e.to].node) {
        pred[e.to] = {u, &e};
      }
    }
  }
  if (!done[dst]) pred[dst] = {};
  return pred;
}

std::vector<Pred> astar(const RoadGraph& graph, std::size_t src, std::size_t dst, Metric metric,
                        const Speeds& speeds) {
  const auto n = graph.node_count();
  const auto& target = graph.node(dst).location;
  const double per_meter = metric == Metric::Distance ? 1.0 : 1.0 / speeds.fastest_meters_per_second();
  // Shaved so rounding in the haversine cannot make the estimate overshoot.
  auto heuristic = [&](std::size_t v) {
    return geo::haversine_distance(graph.node(v).location, target) * per_meter * (1.0 - 1e-12);
  };

  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<Pred> pred(n);
  MinQueue open;
  g[src] = 0.0;
  open.push({heuristic(src), src});
  bool reached = false;
  while (!open.empty()) {
    const auto [f, u] = open.top();
    open.pop();
    if (f > g[u] + heuristic(u)) continue;  // stale entry
    if (u == dst) {
      reached = true;
      break;
    }
    for (const auto& e : graph.out_edges(u)) {
      const double ng = g[u] + edge_cost(e, metric, speeds);
      if (ng < g[e.to]) {
        g[e.to] = ng;
        pred[e.to] = {u, &e};
        open.push({ng + heuristic(e.to), e.to});  // re-opens closed nodes
      } else if (ng == g[e.to] && e.to != src && u < pred[e.to].node) {
        pred[e.to] = {u, &e};
      }
    }
  }
  if (!reached) pred[dst] = {};
  return pred;
}

}  // namespace

Route shortest_route(const RoadGraph& graph, std::string_view src, std::string_view dst,
                     Metric metric, const Speeds& speeds, Search search) {
  validate_speeds(speeds);
  const auto s = graph.index_of(src);
  const auto t = graph.index_of(dst);
  if (s == t) {
    Route r;
    r.metric = metric;
    r.nodes.push_back(graph.node(s).id);
    return r;
  }
  const auto pred = search == Search::Dijkstra ? dijkstra(graph, s, t, metric, speeds)
                                               : astar(graph, s, t, metric, speeds);
  if (pred[t].node == RoadGraph::npos) {
    fail(ErrorCode::Unreachable, "no route from " + std::string(src) + " to " + std::string(dst));
  }
  return assemble(graph, s, t, pred, metric, speeds);
}

std::string snap_to_graph(const RoadGraph& graph, const geo::GeoPoint& p) {
  if (graph.empty()) fail(ErrorCode::EmptyGraph, "the road graph has no nodes");
  return graph.node_index().nearest(p, 1).front().key;
}

Route plan_tour(const RoadGraph& graph, std::span<const std::string> waypoints, Metric metric,
                const Speeds& speeds) {
  if (waypoints.size() < 2) fail(ErrorCode::Validation, "a tour needs at least two waypoints");
  for (const auto& w : waypoints) (void)graph.index_of(w);

  Route tour;
  tour.metric = metric;
  tour.nodes.push_back(waypoints.front());
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    auto leg = shortest_route(graph, waypoints[i], waypoints[i + 1], metric, speeds);
    // The leg starts at the node the tour currently ends on.
    tour.nodes.insert(tour.nodes.end(), std::next(leg.nodes.begin()), leg.nodes.end());
    tour.segments.insert(tour.segments.end(), leg.segments.begin(), leg.segments.end());
    tour.total_length_m += leg.total_length_m;
    tour.est_time_s += leg.est_time_s;
  }
  return tour;
}

void check_route(const RoadGraph& graph, const Route& route, const Speeds& speeds, double rel_tol) {
  auto bad = [](const std::string& why) { fail(ErrorCode::Internal, "malformed route: " + why); };
  if (route.nodes.empty()) bad("no nodes");
  if (route.segments.size() + 1 != route.nodes.size()) bad("segment count mismatch");
  double length = 0.0;
  double time = 0.0;
  for (std::size_t i = 0; i < route.segments.size(); ++i) {
    const auto& s = route.segments[i];
    if (s.from != route.nodes[i] || s.to != route.nodes[i + 1]) bad("segment endpoints");
    const auto from = graph.index_of(s.from);
    const auto to = graph.index_of(s.to);
    const auto out = graph.out_edges(from);
    const bool exists = std::any_of(out.begin(), out.end(), [&](const RoadGraph::OutEdge& e) {
      return e.to == to && e.length_m == s.length_m && e.mode == s.mode;
    });
    if (!exists) bad("no edge " + s.from + "->" + s.to);
    length += s.length_m;
    time += s.length_m / speeds.meters_per_second(s.mode);
  }
  auto close = [&](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  if (!close(length, route.total_length_m)) bad("total length does not match segments");
  if (!close(time, route.est_time_s)) bad("estimated time does not match segments");
}

}  // namespace dms::routing
