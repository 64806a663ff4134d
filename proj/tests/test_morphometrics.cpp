#include <gtest/gtest.h>

#include "physarum/morphometrics.hpp"

using namespace physarum;

namespace {

std::vector<Cell> straight(Cell a, Cell b) {
  std::vector<Cell> out{a};
  for (Cell c = a; c != b;) {
    c.x += (b.x > c.x) - (b.x < c.x);
    c.y += (b.y > c.y) - (b.y < c.y);
    out.push_back(c);
  }
  return out;
}

void link(TubeGraph& g, int a, int b) {
  TubeEdge e;
  e.id = static_cast<int>(g.edges.size());
  e.a = a;
  e.b = b;
  e.polyline = straight(g.nodes[static_cast<std::size_t>(a)].position, g.nodes[static_cast<std::size_t>(b)].position);
  e.length = polyline_length(e.polyline, g.cell_size);
  g.edges.push_back(e);
}

// Star: inoculation in the middle of a branch node joined to three food nodes.
TubeGraph star() {
  TubeGraph g;
  g.add_node({10, 10}, NodeKind::Inoculation);
  g.add_node({10, 20}, NodeKind::Branch);
  g.add_node({0, 20}, NodeKind::Food);
  g.add_node({20, 20}, NodeKind::Food);
  g.add_node({10, 30}, NodeKind::Food);
  link(g, 0, 1);
  link(g, 1, 2);
  link(g, 1, 3);
  link(g, 1, 4);
  return g;
}

}  // namespace

TEST(SiteAdjacency, FollowsRegionCrossings) {
  // the branch cell is equidistant from all four sites and goes to the inoculation
  const PlanarGraph s = site_adjacency(star());
  EXPECT_EQ(s.nodes.size(), 4u);
  EXPECT_EQ(s.edge_set(), (std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}}));
  EXPECT_EQ(s.nodes[0], (Point{10.5, 10.5}));
}

TEST(SiteAdjacency, PassesThroughIntermediateRegions) {
  // a tube from 0 to 2 that skirts site 1 still reads as 0-1-2
  TubeGraph g;
  g.add_node({0, 0}, NodeKind::Inoculation);
  g.add_node({10, 3}, NodeKind::Food);
  g.add_node({20, 0}, NodeKind::Food);
  link(g, 0, 2);
  EXPECT_EQ(site_adjacency(g).edge_set(), (std::set<std::pair<int, int>>{{0, 1}, {1, 2}}));
}

TEST(SiteAdjacency, StopsAtIntermediateSitesAndSkipsAbandoned) {
  TubeGraph g;
  g.add_node({0, 0}, NodeKind::Inoculation);
  g.add_node({5, 0}, NodeKind::Food);
  g.add_node({10, 0}, NodeKind::Food);
  link(g, 0, 1);
  link(g, 1, 2);
  EXPECT_EQ(site_adjacency(g).edge_set(), (std::set<std::pair<int, int>>{{0, 1}, {1, 2}}));
  g.edges[1].abandoned = true;
  EXPECT_EQ(site_adjacency(g).edge_set(), (std::set<std::pair<int, int>>{{0, 1}}));
}

TEST(BisectorCoverage, CountsNearbyEmptyCells) {
  const GridSpec spec{17, 9, 1.0};
  const auto oracle = voronoi_raster(SiteSet{{3.0, 4.5}, {14.0, 4.5}}, spec);  // boundary is column 8
  Grid<std::uint8_t> empty(spec, 0);
  EXPECT_EQ(bisector_coverage(empty, oracle, 2), 0.0);
  for (int y = 0; y < 9; ++y) empty[(Cell{10, y})] = 1;
  EXPECT_EQ(bisector_coverage(empty, oracle, 1), 0.0);
  EXPECT_EQ(bisector_coverage(empty, oracle, 2), 1.0);
  for (int y = 0; y < 9; ++y) empty[(Cell{10, y})] = y < 3;
  EXPECT_DOUBLE_EQ(bisector_coverage(empty, oracle, 2), 5.0 / 9.0);  // rows 0..4 reach an empty cell
  EXPECT_THROW(bisector_coverage(Grid<std::uint8_t>(5, 5, 0), oracle, 1), std::invalid_argument);
  EXPECT_THROW(bisector_coverage(empty, oracle, -1), std::invalid_argument);
  const auto lone = voronoi_raster(SiteSet{{3.0, 3.0}}, spec);
  EXPECT_EQ(bisector_coverage(empty, lone, 0), 1.0);
}

TEST(EdgeMatch, PrecisionAndRecall) {
  const SiteSet pts{{0, 0}, {10, 0}, {0, 10}, {10, 10}};
  const PlanarGraph oracle = make_planar_graph(pts, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  // sim nodes jittered inside tolerance, one spurious diagonal, one oracle edge missing
  const PlanarGraph sim = make_planar_graph(SiteSet{{1, 0}, {10, 1}, {0, 9}, {11, 11}}, {{0, 1}, {0, 2}, {1, 3}, {0, 3}});
  const EdgeMatch m = edge_match(view_of(sim), view_of(oracle), 2.0);
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.75);
  EXPECT_EQ(m.unmatched, (std::vector<std::size_t>{2}));  // (0,3) sorts third
  EXPECT_EQ(m.node_match, (std::vector<int>{0, 1, 2, 3}));
  // too far: nothing matches
  const EdgeMatch far = edge_match(view_of(sim), view_of(oracle), 0.5);
  EXPECT_EQ(far.precision, 0.0);
  EXPECT_EQ(far.recall, 0.0);
  EXPECT_EQ(edge_match(GraphView{}, view_of(oracle), 1.0).precision, 1.0);
}

TEST(EdgeMatch, EachOracleNodeUsedOnce) {
  const PlanarGraph oracle = make_planar_graph(SiteSet{{0, 0}, {10, 0}}, {{0, 1}});
  const PlanarGraph sim = make_planar_graph(SiteSet{{0.5, 0}, {0, 0.2}, {10, 0}}, {{0, 2}, {1, 2}});
  const EdgeMatch m = edge_match(view_of(sim), view_of(oracle), 1.0);
  EXPECT_EQ(m.node_match, (std::vector<int>{-1, 0, 1}));
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
}

TEST(TreeLength, RatioAgainstMst) {
  const TubeGraph g = star();
  const SiteSet sites{{10.5, 10.5}, {0.5, 20.5}, {20.5, 20.5}, {10.5, 30.5}};
  EXPECT_TRUE(spans_sites(g, sites));
  // the sites form a diamond: three sides of 10 * sqrt(2)
  const double mst = 10.0 * std::sqrt(2.0) * 3.0;
  EXPECT_NEAR(euclidean_mst(sites).total_length(), mst, 1e-9);
  EXPECT_NEAR(tree_length_ratio(g, sites), 40.0 / mst, 1e-9);
  const SiteSet missing{{10.5, 10.5}, {40.5, 40.5}};
  EXPECT_FALSE(spans_sites(g, missing));
  EXPECT_THROW(tree_length_ratio(g, missing), std::invalid_argument);
  EXPECT_THROW(tree_length_ratio(g, SiteSet{{10.5, 10.5}}), std::invalid_argument);
}

TEST(PathRatio, AgainstOracle) {
  MazeGrid m{Grid<std::uint8_t>(10, 3, 0), {1, 1}, {8, 1}};
  for (int x = 1; x <= 8; ++x) m.passable[(Cell{x, 1})] = 1;
  EXPECT_DOUBLE_EQ(path_ratio(7.0, m), 1.0);
  EXPECT_DOUBLE_EQ(path_ratio(7.0, m, 0.5), 2.0);
  m.passable[(Cell{4, 1})] = 0;
  EXPECT_THROW(path_ratio(7.0, m), std::invalid_argument);
}

TEST(Morphology, DegreeOrderAndQuadrants) {
  const TubeGraph g = star();
  EXPECT_DOUBLE_EQ(mean_degree(g), 8.0 / 5.0);
  EXPECT_DOUBLE_EQ(order_score(g), 1.0);  // four edges of length 10
  EXPECT_EQ(morphology(g).quadrant, Quadrant::SavantAutism);
  // lengths 1 and 3: mean 2, sd 1, order 1 / 1.5
  const PlanarGraph p = make_planar_graph(SiteSet{{0, 0}, {1, 0}, {4, 0}}, {{0, 1}, {1, 2}});
  EXPECT_NEAR(order_score(p), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(classify_quadrant(3.0, 0.5), Quadrant::Creative);
  EXPECT_EQ(classify_quadrant(3.0, 0.49), Quadrant::Schizophrenic);
  EXPECT_EQ(classify_quadrant(2.9, 0.5), Quadrant::SavantAutism);
  EXPECT_EQ(classify_quadrant(2.9, 0.49), Quadrant::SevereAutism);
  EXPECT_THROW(classify_quadrant(1.0, 1.0, {std::nan(""), 0.5}), std::invalid_argument);
  EXPECT_THROW(mean_degree(GraphView{}), std::invalid_argument);
}

TEST(SelfAvoidance, Index) {
  EXPECT_FALSE(self_avoidance_index({}).has_value());
  const std::vector<ChoiceRecord> c{{1, 0, true}, {2, 0, true}, {3, 0, true}, {4, 0, false}};
  EXPECT_DOUBLE_EQ(*self_avoidance_index(c), 0.25);
  const std::vector<ChoiceRecord> none{{1, 0, false}};
  EXPECT_DOUBLE_EQ(*self_avoidance_index(none), -0.5);
}
