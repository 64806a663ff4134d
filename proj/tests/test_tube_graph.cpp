#include <random>

#include <gtest/gtest.h>

#include "physarum/tube_graph.hpp"

using namespace physarum;

namespace {

std::vector<Cell> line(Cell a, Cell b) {
  std::vector<Cell> out{a};
  Cell c = a;
  while (c != b) {
    c.x += (b.x > c.x) - (b.x < c.x);
    c.y += (b.y > c.y) - (b.y < c.y);
    out.push_back(c);
  }
  return out;
}

int connect(TubeGraph& g, int a, int b) {
  TubeEdge e;
  e.id = static_cast<int>(g.edges.size());
  e.a = a;
  e.b = b;
  e.polyline = line(g.nodes[static_cast<std::size_t>(a)].position, g.nodes[static_cast<std::size_t>(b)].position);
  e.length = polyline_length(e.polyline, g.cell_size);
  g.edges.push_back(e);
  return e.id;
}

}  // namespace

TEST(PolylineLength, MixesStraightAndDiagonal) {
  EXPECT_DOUBLE_EQ(polyline_length({{0, 0}, {1, 0}, {2, 1}}, 0.5), 0.5 * (1.0 + std::sqrt(2.0)));
  EXPECT_EQ(polyline_length({{3, 3}}, 1.0), 0.0);
}

TEST(CheckTubeGraph, AcceptsConsistentGraph) {
  TubeGraph g;
  const int a = g.add_node({0, 0}, NodeKind::Inoculation), b = g.add_node({5, 3}, NodeKind::Food);
  connect(g, a, b);
  EXPECT_NO_THROW(check_tube_graph(g));
}

TEST(CheckTubeGraph, RejectsEachViolation) {
  TubeGraph base;
  base.add_node({0, 0}, NodeKind::Inoculation);
  base.add_node({4, 0}, NodeKind::Tip);
  connect(base, 0, 1);

  auto expect_bad = [](TubeGraph g) { EXPECT_THROW(check_tube_graph(g), InvariantViolation); };
  {
    TubeGraph g = base;
    g.edges[0].b = TubeEdge::kOpen;
    expect_bad(g);
  }
  {
    TubeGraph g = base;
    g.edges[0].b = 0;
    expect_bad(g);
  }
  {
    TubeGraph g = base;
    g.edges[0].length += 0.5;
    expect_bad(g);
  }
  {
    TubeGraph g = base;
    g.edges[0].polyline[2] = {2, 2};  // breaks 8-adjacency
    expect_bad(g);
  }
  {
    TubeGraph g = base;
    g.nodes[1].position = {4, 1};
    expect_bad(g);
  }
  {
    TubeGraph g = base;
    g.edges[0].id = 3;
    expect_bad(g);
  }
}

TEST(Canonicalize, FusesStraightThroughNode) {
  TubeGraph g;
  const int a = g.add_node({0, 0}, NodeKind::Inoculation);
  const int m = g.add_node({5, 0}, NodeKind::Branch);
  const int b = g.add_node({10, 0}, NodeKind::Food);
  connect(g, a, m);
  connect(g, m, b);
  const TubeGraph c = canonicalize(g);
  ASSERT_EQ(c.nodes.size(), 2u);
  ASSERT_EQ(c.edges.size(), 1u);
  EXPECT_DOUBLE_EQ(c.edges[0].length, 10.0);
  EXPECT_EQ(c.edges[0].polyline.size(), 11u);
  EXPECT_NO_THROW(check_tube_graph(c));
}

TEST(Canonicalize, KeepsRightAngleAndRealJunctions) {
  TubeGraph g;
  const int a = g.add_node({0, 0}, NodeKind::Inoculation);
  const int m = g.add_node({5, 0}, NodeKind::Branch);
  const int b = g.add_node({5, 5}, NodeKind::Food);
  connect(g, a, m);
  connect(g, m, b);
  EXPECT_EQ(canonicalize(g).nodes.size(), 3u);

  const int c = g.add_node({10, 0}, NodeKind::Food);
  connect(g, m, c);  // degree 3
  EXPECT_EQ(canonicalize(g).edges.size(), 3u);
}

TEST(Canonicalize, Idempotent) {
  std::mt19937 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    TubeGraph g;
    Cell p{20, 20};
    g.add_node(p, NodeKind::Inoculation);
    for (int k = 1; k < 8; ++k) {
      const int dir = static_cast<int>(gen() % 3);  // mostly straight runs with some turns
      const Cell step = dir == 0 ? Cell{1, 0} : dir == 1 ? Cell{1, 1} : Cell{0, 1};
      const int len = 2 + static_cast<int>(gen() % 4);
      p = {p.x + step.x * len, p.y + step.y * len};
      g.add_node(p, k == 7 ? NodeKind::Food : NodeKind::Branch);
      connect(g, k - 1, k);
    }
    const TubeGraph once = canonicalize(g);
    EXPECT_EQ(canonicalize(once), once);
    EXPECT_NEAR(once.live_length(), g.live_length(), 1e-9);
    EXPECT_NO_THROW(check_tube_graph(once));
  }
}

TEST(TubeGraph, AcyclicComponentsDistance) {
  TubeGraph g;
  for (Cell c : {Cell{0, 0}, Cell{4, 0}, Cell{4, 4}, Cell{0, 4}, Cell{9, 9}}) g.add_node(c, NodeKind::Branch);
  connect(g, 0, 1);
  connect(g, 1, 2);
  connect(g, 2, 3);
  EXPECT_TRUE(is_acyclic(g));
  EXPECT_DOUBLE_EQ(tube_distance(g, 0, 3), 12.0);
  EXPECT_LT(tube_distance(g, 0, 4), 0.0);
  const int closing = connect(g, 3, 0);
  EXPECT_FALSE(is_acyclic(g));
  EXPECT_DOUBLE_EQ(tube_distance(g, 0, 3), 4.0);
  g.edges[static_cast<std::size_t>(closing)].abandoned = true;
  EXPECT_TRUE(is_acyclic(g));
  EXPECT_DOUBLE_EQ(tube_distance(g, 0, 3), 12.0);
  const auto comp = live_components(g);
  EXPECT_EQ(comp[0], comp[3]);
  EXPECT_NE(comp[0], comp[4]);
  EXPECT_EQ(g.live_edge_count(), 3u);
  EXPECT_DOUBLE_EQ(g.live_length(), 12.0);
}
