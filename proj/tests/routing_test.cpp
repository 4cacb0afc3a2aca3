#include <gtest/gtest.h>

#include <random>

#include "dms/routing.hpp"
#include "support.hpp"

using namespace dms;
using namespace dms::routing;
using dms::testing::code_of;

namespace {

// Frozen output of tests/oracles/great_circle.py for (0,0)-(0,0.01).
constexpr double kFixtureStraightM = 1111.95080233533;

RoadGraph line_graph() {
  return RoadGraph::build({{"A", {0, 0}}, {"B", {0, 0.015}}, {"C", {0, 0.04}}},
                          {{"A", "B", 2000, Mode::Walk}, {"B", "C", 3000, Mode::Walk}});
}

const std::string kNodesHeader = "id,lat,lon\n";
const std::string kEdgesHeader = "from,to,length_m,mode,bidirectional\n";

}  // namespace

TEST(GraphLoad, EmptyEdgeFile) {
  const auto r = load_graph_csv(kNodesHeader + "a,0,0\nb,0,0.01\n", kEdgesHeader);
  EXPECT_EQ(r.graph.node_count(), 2u);
  EXPECT_EQ(r.graph.edge_count(), 0u);
  EXPECT_EQ(code_of([&] { (void)shortest_route(r.graph, "a", "b", Metric::Distance); }), ErrorCode::Unreachable);
}

TEST(GraphLoad, DanglingEdge) {
  EXPECT_EQ(code_of([&] { (void)load_graph_csv(kNodesHeader + "a,0,0\n", kEdgesHeader + "a,zz,10,walk,false\n"); }),
            ErrorCode::DanglingEdge);
}

TEST(GraphLoad, EdgeShorterThanStraightLine) {
  EXPECT_NEAR(geo::haversine_distance({0, 0}, {0, 0.01}), kFixtureStraightM, 1e-6);
  const auto r = load_graph_csv(kNodesHeader + "a,0,0\nb,0,0.01\n",
                                kEdgesHeader + "a,b,1100,walk,false\n"  // shorter than 1111.95 m
                                               "a,b,1112,drive,true\n");
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].line, 2u);
  EXPECT_EQ(r.graph.edge_count(), 2u);  // bidirectional row yields both directions
  EXPECT_EQ(adjacent(r.graph, "b"), (std::vector<Adjacent>{{"a", 1112, Mode::Drive}}));
}

TEST(GraphLoad, BadRowsAreDiagnosed) {
  const auto r = load_graph_csv(kNodesHeader + "a,0,0\nb,0,0.01\n",
                                kEdgesHeader + "a,b,-5,walk,false\n"
                                               "a,b,2000,fly,false\n"
                                               "a,b,2000,walk,maybe\n"
                                               "a,b,2000,walk,false\n");
  EXPECT_EQ(r.rejected.size(), 3u);
  EXPECT_EQ(r.graph.edge_count(), 1u);
  EXPECT_EQ(code_of([&] { (void)load_graph_csv(kNodesHeader + "a,95,0\n", kEdgesHeader); }), ErrorCode::Format);
  EXPECT_EQ(code_of([&] { (void)load_graph_csv(kNodesHeader + "a,0,0\na,1,1\n", kEdgesHeader); }),
            ErrorCode::DuplicateKey);
}

TEST(Adjacent, IsolatedNode) {
  const auto g = RoadGraph::build({{"x", {0, 0}}}, {});
  EXPECT_TRUE(adjacent(g, "x").empty());
  EXPECT_EQ(code_of([&] { (void)adjacent(g, "y"); }), ErrorCode::NotFound);
}

TEST(Adjacent, SortedByLength) {
  const auto g = RoadGraph::build({{"A", {0, 0}}, {"B", {0, 0.02}}, {"C", {0, 0.005}}},
                                  {{"A", "B", 3000, Mode::Walk}, {"A", "C", 1000, Mode::Walk}});
  EXPECT_EQ(adjacent(g, "A"), (std::vector<Adjacent>{{"C", 1000, Mode::Walk}, {"B", 3000, Mode::Walk}}));
}

TEST(Adjacent, MatchesEdgeListFilter) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto g = dms::testing::random_graph(rng, 10, 40);
    for (const auto& n : g.nodes()) {
      std::vector<Adjacent> expect;
      for (const auto& e : g.edges()) {
        if (e.from == n.id) expect.push_back({e.to, e.length_m, e.mode});
      }
      std::sort(expect.begin(), expect.end(), [](const Adjacent& a, const Adjacent& b) {
        return a.meters != b.meters ? a.meters < b.meters : a.node < b.node;
      });
      const auto got = adjacent(g, n.id);
      ASSERT_EQ(got.size(), expect.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].node, expect[i].node);
        EXPECT_EQ(got[i].meters, expect[i].meters);
      }
    }
  }
}

TEST(ShortestRoute, SameNode) {
  const auto r = shortest_route(line_graph(), "A", "A", Metric::Distance);
  EXPECT_EQ(r.nodes, (std::vector<std::string>{"A"}));
  EXPECT_EQ(r.cost(), 0.0);
}

TEST(ShortestRoute, LineGraph) {
  const auto g = line_graph();
  const auto r = shortest_route(g, "A", "C", Metric::Distance);
  EXPECT_EQ(r.nodes, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(r.total_length_m, 5000.0);
  EXPECT_DOUBLE_EQ(r.est_time_s, 5000.0 / (5.0 / 3.6));
  check_route(g, r, {});
  EXPECT_EQ(code_of([&] { (void)shortest_route(g, "C", "A", Metric::Distance); }), ErrorCode::Unreachable);
  EXPECT_EQ(code_of([&] { (void)shortest_route(g, "A", "Q", Metric::Distance); }), ErrorCode::NotFound);
}

TEST(ShortestRoute, TimeMetricPrefersDriving) {
  const auto g = RoadGraph::build({{"A", {0, 0}}, {"B", {0, 0.01}}},
                                  {{"A", "B", 1200, Mode::Walk}, {"A", "B", 3000, Mode::Drive}});
  EXPECT_EQ(shortest_route(g, "A", "B", Metric::Distance).segments[0].mode, Mode::Walk);
  const auto fast = shortest_route(g, "A", "B", Metric::Time);
  EXPECT_EQ(fast.segments[0].mode, Mode::Drive);
  EXPECT_DOUBLE_EQ(fast.est_time_s, 3000 / (40.0 / 3.6));
}

TEST(ShortestRoute, EqualCostTieGoesToSmallerPredecessor) {
  const auto g = RoadGraph::build({{"S", {0, 0}}, {"a", {0.001, 0.001}}, {"b", {-0.001, 0.001}}, {"T", {0, 0.002}}},
                                  {{"S", "b", 500, Mode::Walk},
                                   {"S", "a", 500, Mode::Walk},
                                   {"b", "T", 500, Mode::Walk},
                                   {"a", "T", 500, Mode::Walk}});
  for (auto s : {Search::Dijkstra, Search::AStar}) {
    EXPECT_EQ(shortest_route(g, "S", "T", Metric::Distance, {}, s).nodes,
              (std::vector<std::string>{"S", "a", "T"}));
  }
}

TEST(ShortestRoute, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 300; ++t) {
    const auto g = dms::testing::random_graph(rng, 8, 20);
    for (auto metric : {Metric::Distance, Metric::Time}) {
      for (const auto& s : g.nodes()) {
        for (const auto& d : g.nodes()) {
          const double expect = dms::testing::brute_force_cost(g, s.id, d.id, metric, {});
          if (std::isinf(expect)) {
            EXPECT_EQ(code_of([&] { (void)shortest_route(g, s.id, d.id, metric); }), ErrorCode::Unreachable);
            continue;
          }
          const auto r = shortest_route(g, s.id, d.id, metric);
          EXPECT_EQ(r.cost(), expect);
          check_route(g, r, {});
        }
      }
    }
  }
}

TEST(ShortestRoute, AStarAgreesWithDijkstra) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto g = dms::testing::geometric_graph(rng, 60);
    std::uniform_int_distribution<std::size_t> pick(0, g.node_count() - 1);
    for (int q = 0; q < 10; ++q) {
      const auto& s = g.node(pick(rng)).id;
      const auto& d = g.node(pick(rng)).id;
      for (auto metric : {Metric::Distance, Metric::Time}) {
        const auto c1 = code_of([&] { (void)shortest_route(g, s, d, metric); });
        if (c1 != ErrorCode::Internal) {
          EXPECT_EQ(code_of([&] { (void)shortest_route(g, s, d, metric, {}, Search::AStar); }), c1);
          continue;
        }
        const auto a = shortest_route(g, s, d, metric, {}, Search::Dijkstra);
        const auto b = shortest_route(g, s, d, metric, {}, Search::AStar);
        EXPECT_EQ(a.cost(), b.cost());
        EXPECT_EQ(a.nodes, b.nodes);
      }
    }
  }
}

TEST(ShortestRoute, AddingAnEdgeNeverIncreasesCost) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const auto g = dms::testing::random_graph(rng, 8, 14);
    if (g.node_count() < 2) continue;
    std::vector<Node> nodes(g.nodes().begin(), g.nodes().end());
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    const auto& a = nodes[rng() % nodes.size()];
    const auto& b = nodes[rng() % nodes.size()];
    if (a.id == b.id) continue;
    edges.push_back({a.id, b.id, geo::haversine_distance(a.location, b.location) + 10.0, Mode::Walk});
    const auto g2 = RoadGraph::build(nodes, edges);
    for (const auto& s : nodes) {
      for (const auto& d : nodes) {
        const double before = dms::testing::brute_force_cost(g, s.id, d.id, Metric::Distance, {});
        if (std::isinf(before)) continue;
        EXPECT_LE(shortest_route(g2, s.id, d.id, Metric::Distance).cost(), before);
      }
    }
  }
}

TEST(Snap, ExactCoordinateAndTies) {
  const auto g = RoadGraph::build({{"b", {0, 0.01}}, {"a", {0, -0.01}}, {"c", {1, 1}}}, {});
  EXPECT_EQ(snap_to_graph(g, {1, 1}), "c");
  EXPECT_EQ(snap_to_graph(g, {0, 0}), "a");
  EXPECT_EQ(code_of([] { (void)snap_to_graph(RoadGraph{}, {0, 0}); }), ErrorCode::EmptyGraph);
}

TEST(Snap, MatchesLinearScan) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> off(-0.05, 0.3);
  for (int t = 0; t < 200; ++t) {
    const auto g = dms::testing::random_graph(rng, 30, 0);
    const geo::GeoPoint p{9.0 + off(rng), 7.0 + off(rng)};
    geo::Hit best{"", std::numeric_limits<double>::infinity()};
    for (const auto& n : g.nodes()) {
      geo::Hit h{n.id, geo::haversine_distance(p, n.location)};
      if (geo::hit_less(h, best)) best = h;
    }
    EXPECT_EQ(snap_to_graph(g, p), best.key);
  }
}

TEST(PlanTour, Examples) {
  const auto g = line_graph();
  const std::vector<std::string> same = {"A", "A"};
  const auto r0 = plan_tour(g, same, Metric::Distance);
  EXPECT_EQ(r0.nodes, (std::vector<std::string>{"A"}));
  EXPECT_EQ(r0.cost(), 0.0);
  const std::vector<std::string> abc = {"A", "B", "C"};
  const auto r = plan_tour(g, abc, Metric::Distance);
  EXPECT_EQ(r.nodes, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(r.total_length_m, 5000.0);
  const std::vector<std::string> one = {"A"};
  EXPECT_EQ(code_of([&] { (void)plan_tour(g, one, Metric::Distance); }), ErrorCode::Validation);
}

TEST(PlanTour, EqualsLegSum) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 300; ++t) {
    const auto g = dms::testing::geometric_graph(rng, 25);
    std::uniform_int_distribution<std::size_t> pick(0, g.node_count() - 1);
    const std::vector<std::string> w = {g.node(pick(rng)).id, g.node(pick(rng)).id, g.node(pick(rng)).id};
    for (auto metric : {Metric::Distance, Metric::Time}) {
      double sum = 0.0;
      bool reachable = true;
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        try {
          sum += shortest_route(g, w[i], w[i + 1], metric).cost();
        } catch (const Error&) {
          reachable = false;
        }
      }
      if (!reachable) {
        EXPECT_EQ(code_of([&] { (void)plan_tour(g, w, metric); }), ErrorCode::Unreachable);
        continue;
      }
      const auto r = plan_tour(g, w, metric);
      EXPECT_EQ(r.cost(), sum);
      EXPECT_EQ(r.nodes.front(), w.front());
      EXPECT_EQ(r.nodes.back(), w.back());
      check_route(g, r, {}, 1e-9);
    }
  }
}
