#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "physarum/engine.hpp"
#include "physarum/geometry.hpp"
#include "physarum/morphometrics.hpp"
#include "physarum/render.hpp"
#include "physarum/report.hpp"
#include "physarum/scenes.hpp"

namespace physarum {

enum class Experiment { Voronoi, Delaunay, SpanningTree, Continuation, Maze, SubstrateShape, PhaseSpace };

inline constexpr std::array<Experiment, 7> kExperiments{Experiment::Voronoi,      Experiment::Delaunay,
                                                        Experiment::SpanningTree, Experiment::Continuation,
                                                        Experiment::Maze,         Experiment::SubstrateShape,
                                                        Experiment::PhaseSpace};

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Voronoi: return "voronoi";
    case Experiment::Delaunay: return "delaunay";
    case Experiment::SpanningTree: return "spanning_tree";
    case Experiment::Continuation: return "continuation";
    case Experiment::Maze: return "maze";
    case Experiment::SubstrateShape: return "substrate_shape";
    case Experiment::PhaseSpace: return "phase_space";
  }
  return "?";
}

inline Experiment parse_experiment(std::string_view name) {
  for (Experiment e : kExperiments)
    if (name == to_string(e)) return e;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

inline const char* to_string(StopCondition s) {
  switch (s) {
    case StopCondition::MaxTicks: return "max_ticks";
    case StopCondition::AllSourcesColonized: return "all_sources_colonized";
    case StopCondition::SingleZoneRemaining: return "single_zone_remaining";
    case StopCondition::Connected: return "connected";
    case StopCondition::WavesSettled: return "waves_settled";
  }
  return "?";
}

inline StopCondition parse_stop(std::string_view name) {
  for (StopCondition s : {StopCondition::MaxTicks, StopCondition::AllSourcesColonized,
                          StopCondition::SingleZoneRemaining, StopCondition::Connected, StopCondition::WavesSettled})
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown stop condition '" + std::string(name) + "'");
}

/// Tolerances and pass thresholds applied to a run.
struct ReportOptions {
  int bisector_tol = 2;          // cells
  double node_tol_cells = 3.0;   // edge matching, in cell widths
  double min_coverage = 0.90;
  double min_precision = 0.80;
  double max_tree_ratio = 1.5;
  double max_path_ratio = 1.2;
  double min_density_ratio = 5.0;
  double min_self_avoidance = 0.3;
  int min_qualifying_steps = 100;
  int continuation_ticks = 500;  // extra ticks after completion in the continuation experiment
  QuadrantThresholds thresholds;
};

struct ExperimentSpec {
  Experiment name = Experiment::Voronoi;
  std::optional<Scene> scene;  // built-in scene when empty
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::optional<StopCondition> stop;
  int max_ticks = 5000;
  bool report_only = false;  // skip rasters and SVGs
  ReportOptions options;
};

inline Scene default_scene(Experiment e, std::uint64_t seed) {
  switch (e) {
    case Experiment::Voronoi: return scenes::voronoi(seed);
    case Experiment::Delaunay: return scenes::delaunay(seed);
    case Experiment::SpanningTree: return scenes::spanning_tree(seed);
    case Experiment::Continuation: return scenes::continuation(seed);
    case Experiment::Maze: return scenes::maze(seed);
    case Experiment::SubstrateShape: return scenes::substrate_shape(seed);
    case Experiment::PhaseSpace: break;
  }
  throw std::invalid_argument("phase_space has no scene");
}

inline StopCondition default_stop(Experiment e) {
  switch (e) {
    case Experiment::Voronoi: return StopCondition::WavesSettled;
    case Experiment::Delaunay: return StopCondition::Connected;
    default: return StopCondition::AllSourcesColonized;
  }
}

/// Exit status for a finished run: 0 success, 2 incomplete, 3 thresholds missed.
inline int exit_status(const RunReport& r) {
  if (!r.complete) return 2;
  return r.thresholds_met ? 0 : 3;
}

// ---------------------------------------------------------------------------
// Phase-space exemplars

struct Exemplar {
  std::string name;
  Quadrant expected;
  SiteSet points;
  double beta;
  PlanarGraph graph;
};

/// Four beta-skeleton morphologies, one per quadrant: a triangular lattice
/// (dense, regular), a cross of evenly spaced points (sparse, regular),
/// random point clusters (sparse, irregular) and jittered lattice patches
/// joined across wide gaps (dense, irregular).
inline std::vector<Exemplar> phase_space_exemplars(std::uint64_t seed) {
  const double h = std::sqrt(3.0) / 2.0;
  const std::array<Point, 5> centres{{{30, 30}, {200, 40}, {120, 130}, {40, 210}, {210, 220}}};
  std::vector<Exemplar> out;

  SiteSet lattice;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) lattice.push_back({40.0 + 20.0 * c + (r % 2) * 10.0, 40.0 + 20.0 * h * r});
  out.push_back({"dense_regular", Quadrant::Creative, lattice, 1.0, {}});

  SiteSet cross{{128, 128}};
  for (int k = 1; k <= 6; ++k) {
    cross.push_back({128.0 + 18.0 * k, 128});
    cross.push_back({128.0 - 18.0 * k, 128});
    cross.push_back({128, 128.0 + 18.0 * k});
    cross.push_back({128, 128.0 - 18.0 * k});
  }
  out.push_back({"sparse_regular", Quadrant::SavantAutism, cross, 2.0, {}});

  SeqRng rng(seed, 0x636c7573);
  SiteSet clusters;
  for (Point c : centres)
    for (int i = 0; i < 10; ++i) clusters.push_back({c.x + rng.uniform(-4, 4), c.y + rng.uniform(-4, 4)});
  out.push_back({"sparse_irregular", Quadrant::SevereAutism, clusters, 2.0, {}});

  SiteSet patches;
  for (Point c : centres)
    for (int r = 0; r < 6; ++r)
      for (int k = 0; k < 6; ++k)
        patches.push_back({c.x + 3.0 * k + 1.5 * (r % 2) + rng.uniform(-0.3, 0.3), c.y + 3.0 * h * r + rng.uniform(-0.3, 0.3)});
  out.push_back({"dense_irregular", Quadrant::Schizophrenic, patches, 1.0, {}});

  for (auto& e : out) e.graph = beta_skeleton(e.points, e.beta);
  return out;
}

namespace detail {

inline SiteSet site_points(const Scene& s, bool with_sources) {
  SiteSet out;
  auto add = [&](Cell c) {
    const Point p = cell_center(s.grid, c);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  for (Cell c : s.inoculation_sites) add(c);
  if (with_sources)
    for (const auto& src : s.sources)
      if (src.kind == Species::Attractant) add(src.position);
  return out;
}

inline PlanarGraph path_graph(const std::vector<Cell>& cells, const GridSpec& grid) {
  std::vector<Point> nodes;
  std::vector<std::pair<int, int>> edges;
  for (Cell c : cells) nodes.push_back(cell_center(grid, c));
  for (std::size_t i = 1; i < nodes.size(); ++i) edges.emplace_back(static_cast<int>(i - 1), static_cast<int>(i));
  return make_planar_graph(nodes, std::move(edges));
}

inline std::string phase_space_svg(const std::vector<Exemplar>& ex, const std::vector<MorphologyReport>& m,
                                   const QuadrantThresholds& t) {
  // x: mean degree 0..6, y: order score 0..1, plotted in a 120 x 100 mm box.
  auto px = [](double d) { return 10.0 + std::clamp(d, 0.0, 6.0) / 6.0 * 100.0; };
  auto py = [](double o) { return 90.0 - std::clamp(o, 0.0, 1.0) * 80.0; };
  std::string out = svg_header(120, 100);
  out += "<rect x=\"10\" y=\"10\" width=\"100\" height=\"80\" fill=\"none\" stroke=\"#000\" stroke-width=\"0.3\"/>\n";
  out += "<line x1=\"" + svg_num(px(t.degree_split)) + "\" y1=\"10\" x2=\"" + svg_num(px(t.degree_split)) +
         "\" y2=\"90\" stroke=\"#888\" stroke-width=\"0.3\"/>\n";
  out += "<line x1=\"10\" y1=\"" + svg_num(py(t.order_split)) + "\" x2=\"110\" y2=\"" + svg_num(py(t.order_split)) +
         "\" stroke=\"#888\" stroke-width=\"0.3\"/>\n";
  for (std::size_t i = 0; i < ex.size(); ++i) {
    out += "<circle cx=\"" + svg_num(px(m[i].mean_degree)) + "\" cy=\"" + svg_num(py(m[i].order_score)) +
           "\" r=\"1.5\" fill=\"#1a5276\"/>\n";
    out += "<text x=\"" + svg_num(px(m[i].mean_degree) + 2.0) + "\" y=\"" + svg_num(py(m[i].order_score) - 2.0) +
           "\" font-size=\"3\">" + ex[i].name + " (" + to_string(m[i].quadrant) + ")</text>\n";
  }
  out += "</svg>\n";
  return out;
}

struct Writer {
  std::filesystem::path dir;
  bool skip_images;
  RunReport& report;

  void text(const std::string& name, const std::string& content) {
    write_text(content, (dir / name).string());
    report.artifacts.push_back(name);
  }
  void image(const std::string& name, const GreyImage& img) {
    if (skip_images) return;
    write_pgm(img, (dir / name).string());
    report.artifacts.push_back(name);
  }
  void svg(const std::string& name, const std::string& content) {
    if (skip_images) return;
    text(name, content);
  }
};

inline void run_phase_space(const ExperimentSpec& spec, RunReport& report, Writer& out) {
  const auto ex = phase_space_exemplars(spec.seed);
  std::vector<MorphologyReport> m;
  bool all = true;
  for (const auto& e : ex) {
    m.push_back(morphology(e.graph, spec.options.thresholds));
    const bool ok = m.back().quadrant == e.expected;
    all = all && ok;
    report.metrics[e.name + ".mean_degree"] = m.back().mean_degree;
    report.metrics[e.name + ".order_score"] = m.back().order_score;
    report.flags[e.name + ".in_expected_quadrant"] = ok;
    out.svg("exemplar_" + e.name + ".svg", graph_svg(e.graph, 256.0, 256.0));
  }
  out.svg("phase_space.svg", phase_space_svg(ex, m, spec.options.thresholds));
  report.complete = true;
  report.thresholds_met = all;
}

}  // namespace detail

/// Runs one named experiment, writes its artifacts into spec.output_dir and
/// returns the report. report.json and trace.ndjson are always written;
/// wall time goes to timing.json so the report itself stays deterministic.
inline RunReport run_experiment(const ExperimentSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(spec.output_dir);
  RunReport report;
  report.experiment = to_string(spec.name);
  report.seed = spec.seed;
  detail::Writer out{spec.output_dir, spec.report_only, report};
  std::vector<TickSummary> trace;

  if (spec.name == Experiment::PhaseSpace) {
    detail::run_phase_space(spec, report, out);
  } else {
    Scene scene = spec.scene ? *spec.scene : default_scene(spec.name, spec.seed);
    scene.params.seed = spec.seed;
    if (const std::string bad = engine_params_error(scene.params); !bad.empty())
      throw std::invalid_argument("invalid engine parameter: " + bad);
    const ReportOptions& opt = spec.options;
    const StopCondition stop = spec.stop.value_or(default_stop(spec.name));
    RunResult run = run_until(init_plasmodium(scene), scene, stop, spec.max_ticks);
    trace = run.trace;
    if (spec.name == Experiment::Continuation && run.complete) {
      RunResult more = run_until(std::move(run.state), scene, StopCondition::MaxTicks, opt.continuation_ticks);
      run.state = std::move(more.state);
      trace.insert(trace.end(), more.trace.begin(), more.trace.end());
    }
    const PlasmodiumState& st = run.state;
    const TubeGraph g = extract_graph(st);
    const double node_tol = opt.node_tol_cells * scene.grid.cell_size;

    report.ticks = st.tick;
    report.complete = run.complete;
    if (!g.nodes.empty()) report.morphology = morphology(g, opt.thresholds);
    report.comparison.self_avoidance_index = self_avoidance_index(st.choices);
    report.metrics["qualifying_steps"] = static_cast<double>(st.choices.size());
    report.metrics["live_zones"] = static_cast<double>(st.live_zone_count());
    report.metrics["branch_events"] = static_cast<double>(st.branch_events);
    report.metrics["live_tube_length_mm"] = g.live_length();
    bool ok = true;

    switch (spec.name) {
      case Experiment::Voronoi: {
        const auto oracle = voronoi_raster(detail::site_points(scene, false), scene.grid);
        Grid<std::uint8_t> empty(scene.grid, 0);
        for (std::size_t i = 0; i < empty.size(); ++i) empty.at(i) = st.occupancy.at(i).empty() ? 1 : 0;
        const double cov = bisector_coverage(empty, oracle, opt.bisector_tol);
        report.comparison.bisector_coverage = cov;
        ok = cov >= opt.min_coverage;
        out.image("oracle_voronoi.pgm", partition_image(oracle));
        break;
      }
      case Experiment::Delaunay: {
        const SiteSet sites = detail::site_points(scene, false);
        const PlanarGraph oracle = delaunay(sites);
        const PlanarGraph adj = site_adjacency(g);
        const EdgeMatch m = edge_match(view_of(adj), view_of(oracle), node_tol);
        report.comparison.edge_precision = m.precision;
        report.comparison.edge_recall = m.recall;
        // every unmatched sim edge must still join two sites that are Gabriel or MST neighbours
        const PlanarGraph gabriel = beta_skeleton(sites, 1.0), mst = euclidean_mst(sites);
        bool sane = true;
        for (std::size_t k : m.unmatched) {
          const int a = m.node_match[static_cast<std::size_t>(adj.edges[k].first)];
          const int b = m.node_match[static_cast<std::size_t>(adj.edges[k].second)];
          sane = sane && a >= 0 && b >= 0 && (gabriel.has_edge(a, b) || mst.has_edge(a, b));
        }
        const bool connected = st.component_count() == 1;
        report.flags["connected"] = connected;
        report.flags["proximity_sane"] = sane;
        ok = m.precision >= opt.min_precision && connected && sane;
        out.svg("graph.svg", graph_svg(g, scene.grid, &oracle));
        break;
      }
      case Experiment::SpanningTree: {
        const SiteSet sites = detail::site_points(scene, true);
        const bool spans = spans_sites(g, sites);
        const bool acyclic = is_acyclic(g);
        report.flags["spans_sites"] = spans;
        report.flags["acyclic"] = acyclic;
        if (spans && sites.size() >= 2) report.comparison.tree_length_ratio = tree_length_ratio(g, sites);
        ok = spans && acyclic && report.comparison.tree_length_ratio &&
             *report.comparison.tree_length_ratio <= opt.max_tree_ratio;
        if (sites.size() >= 2) {
          const PlanarGraph mst = euclidean_mst(sites);
          out.svg("graph.svg", graph_svg(g, scene.grid, &mst));
        }
        break;
      }
      case Experiment::Continuation: {
        int max_visits = 0;
        for (const auto& e : st.graph.edges) max_visits = std::max(max_visits, e.visits);
        report.metrics["max_edge_visits"] = max_visits;
        report.metrics["revisit_events"] = st.revisit_events;
        ok = scene.params.continuation ? max_visits >= 2 : st.revisit_events == 0;
        const bool depleting = std::any_of(scene.sources.begin(), scene.sources.end(),
                                           [](const StimulusSource& s) { return s.consumable; });
        if (depleting) {
          const auto idx = report.comparison.self_avoidance_index;
          ok = ok && idx && *idx > opt.min_self_avoidance &&
               static_cast<int>(st.choices.size()) >= opt.min_qualifying_steps;
        }
        out.svg("graph.svg", graph_svg(g, scene.grid));
        break;
      }
      case Experiment::Maze: {
        const MazeGrid maze = scenes::maze_of(scene);
        const auto best = grid_shortest_path(maze);
        const bool single = st.live_zone_count() == 1;
        report.flags["single_zone"] = single;
        report.flags["goal_reachable"] = best.has_value();
        int a = -1, b = -1;
        for (const auto& n : g.nodes) {
          if (n.position == maze.start && a < 0) a = n.id;
          if (n.position == maze.goal && b < 0) b = n.id;
        }
        if (best && run.complete && a >= 0 && b >= 0) {
          const double d = tube_distance(g, a, b);
          if (d >= 0.0) report.comparison.path_ratio = path_ratio(d, maze, scene.grid.cell_size);
        }
        ok = single && report.comparison.path_ratio && *report.comparison.path_ratio <= opt.max_path_ratio;
        if (best) {
          const PlanarGraph path = detail::path_graph(best->cells, scene.grid);
          out.svg("graph.svg", graph_svg(g, scene.grid, &path));
        } else {
          out.svg("graph.svg", graph_svg(g, scene.grid));
        }
        break;
      }
      case Experiment::SubstrateShape: {
        double in = 0, in_n = 0, outside = 0, out_n = 0;
        for (int y = 0; y < scene.grid.height; ++y)
          for (int x = 0; x < scene.grid.width; ++x) {
            const Cell c{x, y};
            if (scene.substrate.is_wall(c)) continue;
            const double o = st.occupancy[c].plasmodium() ? 1.0 : 0.0;
            if (scene.nutrient_rich(c)) {
              in += o;
              in_n += 1;
            } else {
              outside += o;
              out_n += 1;
            }
          }
        const double din = in_n > 0 ? in / in_n : 0.0, dout = out_n > 0 ? outside / out_n : 0.0;
        std::size_t branches_outside = 0;
        for (const auto& n : g.nodes)
          if (n.kind == NodeKind::Branch && !scene.nutrient_rich(n.position)) ++branches_outside;
        report.metrics["density_inside"] = din;
        report.metrics["density_outside"] = dout;
        report.metrics["branch_nodes_outside"] = static_cast<double>(branches_outside);
        ok = din > 0.0 && din >= opt.min_density_ratio * dout && branches_outside >= 1;
        out.svg("graph.svg", graph_svg(g, scene.grid));
        break;
      }
      case Experiment::PhaseSpace: break;
    }
    report.thresholds_met = run.complete && ok;
    out.image("occupancy.pgm", occupancy_image(st));
    if (!scene.sources.empty()) out.image("attractant.pgm", field_image(st.fields.total(scene.grid, Species::Attractant)));
  }

  out.text("trace.ndjson", trace_ndjson(trace));
  report.artifacts.push_back("report.json");
  std::sort(report.artifacts.begin(), report.artifacts.end());
  emit_report(report, (spec.output_dir / "report.json").string());
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(canonical_json({{"wall_seconds", report.wall_seconds}}), (spec.output_dir / "timing.json").string());
  return report;
}

}  // namespace physarum
