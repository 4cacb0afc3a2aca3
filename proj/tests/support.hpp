#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dms/error.hpp"
#include "dms/geo.hpp"
#include "dms/routing.hpp"

namespace dms::testing {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;  // sentinel: nothing thrown
}

inline std::string node_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%03zu", i);
  return buf;
}

/// Random directed multigraph with nodes scattered in a small box; every edge
/// length is at least the straight-line distance between its endpoints.
inline routing::RoadGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_edges,
                                       double box_deg = 0.05) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_nodes), e_dist(0, max_edges);
  std::uniform_real_distribution<double> off(0.0, box_deg), stretch(1.0, 3.0), extra(0.0, 500.0);
  const std::size_t n = n_dist(rng);
  std::vector<routing::Node> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({node_name(i), {9.0 + off(rng), 7.0 + off(rng)}});
  std::vector<routing::Edge> edges;
  const std::size_t m = e_dist(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double straight = geo::haversine_distance(nodes[a].location, nodes[b].location);
    const double len = std::max(1.0, straight * stretch(rng) + extra(rng));
    edges.push_back({nodes[a].id, nodes[b].id, len, rng() % 2 ? routing::Mode::Walk : routing::Mode::Drive});
  }
  return routing::RoadGraph::build(std::move(nodes), std::move(edges));
}

/// Random geometric graph: nodes in a box, each linked to a few near
/// neighbours in both directions with length = straight line times a factor.
inline routing::RoadGraph geometric_graph(std::mt19937_64& rng, std::size_t max_nodes) {
  std::uniform_int_distribution<std::size_t> n_dist(2, max_nodes);
  std::uniform_real_distribution<double> off(0.0, 0.2), stretch(1.0, 1.6);
  const std::size_t n = n_dist(rng);
  std::vector<routing::Node> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({node_name(i), {9.0 + off(rng), 7.0 + off(rng)}});
  std::vector<routing::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) near.emplace_back(geo::haversine_distance(nodes[i].location, nodes[j].location), j);
    }
    std::sort(near.begin(), near.end());
    const std::size_t k = std::min<std::size_t>(near.size(), 1 + rng() % 4);
    for (std::size_t t = 0; t < k; ++t) {
      const auto j = near[t].second;
      const double len = near[t].first * stretch(rng) + 1.0;
      const auto mode = rng() % 3 ? routing::Mode::Drive : routing::Mode::Walk;
      edges.push_back({nodes[i].id, nodes[j].id, len, mode});
      edges.push_back({nodes[j].id, nodes[i].id, len, mode});
    }
  }
  return routing::RoadGraph::build(std::move(nodes), std::move(edges));
}

/// Great-circle distance from unit vectors and atan2(|a x b|, a . b); shares
/// nothing with the library's haversine formula.
inline double great_circle_oracle(const geo::GeoPoint& a, const geo::GeoPoint& b) {
  const double d = 3.14159265358979323846 / 180.0;
  const double ax = std::cos(a.lat * d) * std::cos(a.lon * d), ay = std::cos(a.lat * d) * std::sin(a.lon * d);
  const double az = std::sin(a.lat * d);
  const double bx = std::cos(b.lat * d) * std::cos(b.lon * d), by = std::cos(b.lat * d) * std::sin(b.lon * d);
  const double bz = std::sin(b.lat * d);
  const double cx = ay * bz - az * by, cy = az * bx - ax * bz, cz = ax * by - ay * bx;
  return geo::kEarthRadiusM * std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), ax * bx + ay * by + az * bz);
}

/// Every hit by (distance, key), computed by scanning all points.
inline std::vector<geo::Hit> linear_scan(const std::vector<geo::SpatialIndex::Entry>& pts, const geo::GeoPoint& o) {
  std::vector<geo::Hit> hits;
  hits.reserve(pts.size());
  for (const auto& [k, p] : pts) hits.push_back({k, geo::haversine_distance(o, p)});
  std::sort(hits.begin(), hits.end(), geo::hit_less);
  return hits;
}

/// Cost of one edge under a metric, the same per-edge quantity a route sums.
inline double edge_cost(const routing::Edge& e, routing::Metric metric, const routing::Speeds& speeds) {
  return metric == routing::Metric::Distance ? e.length_m : e.length_m / speeds.meters_per_second(e.mode);
}

/// Minimum left-to-right summed cost over all simple paths, by exhaustive
/// depth-first enumeration. +inf when dst is unreachable.
inline double brute_force_cost(const routing::RoadGraph& g, const std::string& src, const std::string& dst,
                               routing::Metric metric, const routing::Speeds& speeds) {
  if (src == dst) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> seen(g.node_count(), false);
  std::function<void(const std::string&, double)> dfs = [&](const std::string& at, double cost) {
    if (at == dst) {
      best = std::min(best, cost);
      return;
    }
    seen[g.find(at)] = true;
    for (const auto& e : g.edges()) {
      if (e.from != at || seen[g.find(e.to)]) continue;
      dfs(e.to, cost + edge_cost(e, metric, speeds));
    }
    seen[g.find(at)] = false;
  };
  dfs(src, 0.0);
  return best;
}

}  // namespace dms::testing
