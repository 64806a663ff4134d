#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "physarum/experiments.hpp"

using namespace physarum;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("physarum_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Render, OccupancyImage) {
  Scene s = scenes::blank(8, 8, 0.0);
  s.inoculation_sites = {{2, 3}};
  PlasmodiumState st = init_plasmodium(s);
  st.occupancy[(Cell{5, 5})] = {Tag::AbandonedTube, 0};
  st.occupancy[(Cell{6, 5})] = {Tag::Tube, 0};
  st.occupancy[(Cell{7, 5})] = {Tag::Blocked, -1};
  const GreyImage img = occupancy_image(st);
  EXPECT_EQ(img.pixels[3 * 8 + 2], 128);
  EXPECT_EQ(img.pixels[5 * 8 + 5], 64);
  EXPECT_EQ(img.pixels[5 * 8 + 6], 255);
  EXPECT_EQ(img.pixels[5 * 8 + 7], 0);
  EXPECT_EQ(encode_pgm(img).substr(0, 9), "P5 8 8 25");
}

TEST(Render, FieldImageNormalizes) {
  Grid<double> f(3, 1, 0.0);
  f[(Cell{1, 0})] = 1.0;
  f[(Cell{2, 0})] = 2.0;
  EXPECT_EQ(field_image(f).pixels, (std::vector<std::uint8_t>{0, 128, 255}));
  EXPECT_EQ(field_image(Grid<double>(4, 4, 3.5)).pixels, std::vector<std::uint8_t>(16, 0));
}

TEST(Render, PartitionImageMarksBoundary) {
  const auto p = voronoi_raster(SiteSet{{3.0, 2.0}, {14.0, 2.0}}, GridSpec{17, 4, 1.0});
  const GreyImage img = partition_image(p);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 17; ++x) EXPECT_EQ(img.pixels[static_cast<std::size_t>(y * 17 + x)], x == 8 ? 255 : 0);
}

TEST(Render, SvgElementCounts) {
  TubeGraph g;
  g.add_node({0, 0}, NodeKind::Inoculation);
  g.add_node({3, 0}, NodeKind::Food);
  g.add_node({3, 3}, NodeKind::Food);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}) {
    TubeEdge e;
    e.id = static_cast<int>(g.edges.size());
    e.a = a;
    e.b = b;
    const Cell p = g.nodes[static_cast<std::size_t>(a)].position, q = g.nodes[static_cast<std::size_t>(b)].position;
    for (int k = 0; k <= 3; ++k) e.polyline.push_back({p.x + (q.x - p.x) * k / 3, p.y + (q.y - p.y) * k / 3});
    e.length = 3.0;
    g.edges.push_back(e);
  }
  g.edges[1].abandoned = true;
  const PlanarGraph oracle = make_planar_graph(SiteSet{{0.5, 0.5}, {3.5, 0.5}, {3.5, 3.5}}, {{0, 1}, {1, 2}, {0, 2}});
  const std::string svg = graph_svg(g, GridSpec{8, 8, 1.0}, &oracle);
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 1u);
  EXPECT_EQ(count(svg, "<line"), 3u);
  EXPECT_EQ(count(svg, "<svg"), 1u);
  EXPECT_EQ(count(graph_svg(g, GridSpec{8, 8, 1.0}), "<line"), 0u);
  EXPECT_EQ(count(graph_svg(oracle, 10, 10), "<polyline"), 3u);
}

TEST(Report, CanonicalFloats) {
  EXPECT_EQ(canonical_float(1.0), "1.0");
  EXPECT_EQ(canonical_float(-0.0), "0.0");
  EXPECT_EQ(canonical_float(0.1), "0.1");
  EXPECT_EQ(canonical_float(1e20), "1e+20");
  EXPECT_EQ(canonical_float(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(canonical_float(std::nan("")), "null");
  EXPECT_EQ(canonical_float(HUGE_VAL), "null");
}

TEST(Report, CanonicalJsonSortsKeys) {
  const nlohmann::json j = {{"b", 2}, {"a", {1.5, nullptr, true}}, {"c", "x"}};
  EXPECT_EQ(canonical_json(j), "{\"a\":[1.5,null,true],\"b\":2,\"c\":\"x\"}\n");
}

TEST(Report, MissingValuesAreNull) {
  RunReport r;
  r.experiment = "maze";
  r.metrics["ratio"] = 2.0;
  const std::string s = emit_report(r);
  EXPECT_NE(s.find("\"path_ratio\":null"), std::string::npos);
  EXPECT_NE(s.find("\"morphology\":null"), std::string::npos);
  EXPECT_NE(s.find("\"ratio\":2.0"), std::string::npos);
  EXPECT_EQ(s.find("wall"), std::string::npos);
  const auto parsed = nlohmann::json::parse(s);
  EXPECT_EQ(parsed["experiment"], "maze");
}

TEST(Report, TraceLines) {
  const std::string t = trace_ndjson({{1, 2, 3, 0}, {2, 2, 5, 1}});
  EXPECT_EQ(t, "{\"colonized\":0,\"occupied\":3,\"tick\":1,\"zones\":2}\n{\"colonized\":1,\"occupied\":5,\"tick\":2,\"zones\":2}\n");
}

TEST(Experiments, NamesRoundTrip) {
  for (Experiment e : kExperiments) EXPECT_EQ(parse_experiment(to_string(e)), e);
  EXPECT_THROW(parse_experiment("voronoy"), std::invalid_argument);
  for (StopCondition s : {StopCondition::MaxTicks, StopCondition::AllSourcesColonized, StopCondition::SingleZoneRemaining,
                          StopCondition::Connected, StopCondition::WavesSettled})
    EXPECT_EQ(parse_stop(to_string(s)), s);
}

TEST(Experiments, ExitStatus) {
  RunReport r;
  EXPECT_EQ(exit_status(r), 2);
  r.complete = true;
  EXPECT_EQ(exit_status(r), 3);
  r.thresholds_met = true;
  EXPECT_EQ(exit_status(r), 0);
}

TEST(Experiments, MazeRunIsByteIdentical) {
  ExperimentSpec spec;
  spec.name = Experiment::Maze;
  spec.seed = 4;
  spec.scene = scenes::maze_scene(generate_perfect_maze(7, 7, 4), 4);
  const fs::path dir_a = scratch("det_a");
  spec.output_dir = dir_a;
  const RunReport a = run_experiment(spec);
  spec.output_dir = scratch("det_b");
  const RunReport b = run_experiment(spec);
  EXPECT_TRUE(a.complete);
  EXPECT_EQ(exit_status(a), 0);
  ASSERT_EQ(a.artifacts, b.artifacts);
  EXPECT_TRUE(std::find(a.artifacts.begin(), a.artifacts.end(), "report.json") != a.artifacts.end());
  EXPECT_TRUE(std::is_sorted(a.artifacts.begin(), a.artifacts.end()));
  for (const auto& name : a.artifacts) {
    const std::string x = slurp(dir_a / name);
    EXPECT_FALSE(x.empty()) << name;
    EXPECT_EQ(x, slurp(spec.output_dir / name)) << name;
  }
  EXPECT_TRUE(fs::exists(spec.output_dir / "timing.json"));
  fs::remove_all(spec.output_dir);
  fs::remove_all(dir_a);
}

TEST(Experiments, SealedMazeIsIncomplete) {
  MazeGrid m = generate_perfect_maze(5, 5, 2);
  for (int d = 0; d < 8; ++d) {
    const Cell n{m.goal.x + kCompass[static_cast<std::size_t>(d)].x, m.goal.y + kCompass[static_cast<std::size_t>(d)].y};
    m.passable[n] = 0;
  }
  ExperimentSpec spec;
  spec.name = Experiment::Maze;
  spec.seed = 1;
  spec.scene = scenes::maze_scene(m, 1);
  spec.max_ticks = 300;
  spec.report_only = true;
  spec.output_dir = scratch("sealed");
  const RunReport r = run_experiment(spec);
  EXPECT_FALSE(r.complete);
  EXPECT_FALSE(r.comparison.path_ratio.has_value());
  EXPECT_EQ(exit_status(r), 2);
  EXPECT_FALSE(r.flags.at("goal_reachable"));
  fs::remove_all(spec.output_dir);
}

TEST(Experiments, BadEngineParameterRejected) {
  ExperimentSpec spec;
  spec.name = Experiment::Maze;
  spec.scene = scenes::maze_scene(generate_perfect_maze(4, 4, 1), 1);
  spec.scene->params.branch_ratio = 0.0;
  spec.output_dir = scratch("bad");
  EXPECT_THROW(run_experiment(spec), std::invalid_argument);
  fs::remove_all(spec.output_dir);
}

TEST(PhaseSpace, ExemplarsLandInTheirQuadrants) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto ex = phase_space_exemplars(seed);
    ASSERT_EQ(ex.size(), 4u);
    for (const auto& e : ex) {
      SCOPED_TRACE(e.name);
      EXPECT_EQ(morphology(e.graph).quadrant, e.expected);
      EXPECT_EQ(e.graph.edge_set(), beta_skeleton(e.points, e.beta).edge_set());
    }
  }
}

TEST(PhaseSpace, ReportHasNoSimulation) {
  ExperimentSpec spec;
  spec.name = Experiment::PhaseSpace;
  spec.seed = 1;
  spec.report_only = true;
  spec.output_dir = scratch("phase");
  const RunReport r = run_experiment(spec);
  EXPECT_TRUE(r.complete);
  EXPECT_TRUE(r.thresholds_met);
  EXPECT_EQ(r.ticks, 0);
  fs::remove_all(spec.output_dir);
}
