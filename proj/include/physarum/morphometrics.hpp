#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "physarum/engine.hpp"
#include "physarum/geometry.hpp"
#include "physarum/tube_graph.hpp"

namespace physarum {

/// Straight-line view of a graph: node positions in millimetres and its live
/// (non-abandoned) edges.
struct GraphView {
  std::vector<Point> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> lengths;
};

inline GraphView view_of(const PlanarGraph& g) { return {g.nodes, g.edges, g.lengths}; }

inline GraphView view_of(const TubeGraph& g) {
  GraphView v;
  const GridSpec spec{1, 1, g.cell_size};
  for (const auto& n : g.nodes) v.nodes.push_back(cell_center(spec, n.position));
  for (const auto& e : g.edges) {
    if (e.abandoned) continue;
    v.edges.emplace_back(e.a, e.b);
    v.lengths.push_back(e.length);
  }
  return v;
}

/// Reads a tube graph through the Voronoi partition of its food and
/// inoculation nodes: every cell of a live tube belongs to its nearest site
/// (ties: lowest site index), and two sites are adjacent when some tube steps
/// from one region into the other. Branch and Tip nodes disappear.
inline PlanarGraph site_adjacency(const TubeGraph& g) {
  std::vector<Point> pts;
  const GridSpec spec{1, 1, g.cell_size};
  for (const auto& node : g.nodes)
    if (node.kind == NodeKind::Inoculation || node.kind == NodeKind::Food) pts.push_back(cell_center(spec, node.position));
  auto region = [&](Cell c) {
    const Point p = cell_center(spec, c);
    int best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (distance(p, pts[i]) < distance(p, pts[static_cast<std::size_t>(best)])) best = static_cast<int>(i);
    return best;
  };
  std::vector<std::pair<int, int>> edges;
  if (pts.size() >= 2)
    for (const auto& e : g.edges) {
      if (e.abandoned) continue;
      int prev = -1;
      for (Cell c : e.polyline) {
        const int r = region(c);
        if (prev >= 0 && r != prev) edges.emplace_back(prev, r);
        prev = r;
      }
    }
  return make_planar_graph(pts, std::move(edges));
}

// ---------------------------------------------------------------------------
// Comparison against oracles

/// Fraction of oracle boundary cells with an empty cell within Chebyshev
/// distance `tol`. An oracle without boundary cells scores 1.
inline double bisector_coverage(const Grid<std::uint8_t>& empty_cells, const RasterPartition& oracle, int tol) {
  if (!empty_cells.same_shape(oracle.label)) throw std::invalid_argument("bisector_coverage: grid mismatch");
  if (tol < 0) throw std::invalid_argument("bisector_coverage: negative tolerance");
  std::size_t total = 0, hit = 0;
  const int w = empty_cells.width(), h = empty_cells.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!oracle.is_boundary({x, y})) continue;
      ++total;
      bool found = false;
      for (int dy = -tol; dy <= tol && !found; ++dy)
        for (int dx = -tol; dx <= tol && !found; ++dx) {
          const Cell c{x + dx, y + dy};
          found = empty_cells.contains(c) && empty_cells[c] != 0;
        }
      hit += found;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

struct EdgeMatch {
  double precision = 1.0;
  double recall = 1.0;
  std::vector<int> node_match;           // oracle node per sim node, or -1
  std::vector<std::size_t> unmatched;    // indices into the sim view's edges
};

/// Greedy nearest matching of sim nodes to oracle nodes within node_tol
/// (millimetres), each oracle node used once, then edge-wise comparison.
/// An empty sim graph has precision 1 by convention.
inline EdgeMatch edge_match(const GraphView& sim, const GraphView& oracle, double node_tol) {
  EdgeMatch r;
  r.node_match.assign(sim.nodes.size(), -1);
  std::vector<std::tuple<double, int, int>> pairs;
  for (std::size_t i = 0; i < sim.nodes.size(); ++i)
    for (std::size_t j = 0; j < oracle.nodes.size(); ++j) {
      const double d = distance(sim.nodes[i], oracle.nodes[j]);
      if (d <= node_tol) pairs.emplace_back(d, static_cast<int>(i), static_cast<int>(j));
    }
  std::sort(pairs.begin(), pairs.end());
  std::vector<char> used(oracle.nodes.size(), 0);
  for (const auto& [d, i, j] : pairs) {
    if (r.node_match[static_cast<std::size_t>(i)] >= 0 || used[static_cast<std::size_t>(j)]) continue;
    r.node_match[static_cast<std::size_t>(i)] = j;
    used[static_cast<std::size_t>(j)] = 1;
  }
  std::vector<std::pair<int, int>> oracle_edges;
  for (auto [a, b] : oracle.edges) oracle_edges.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(oracle_edges.begin(), oracle_edges.end());
  oracle_edges.erase(std::unique(oracle_edges.begin(), oracle_edges.end()), oracle_edges.end());
  std::vector<char> hit(oracle_edges.size(), 0);
  std::size_t matched = 0;
  for (std::size_t k = 0; k < sim.edges.size(); ++k) {
    const int a = r.node_match[static_cast<std::size_t>(sim.edges[k].first)];
    const int b = r.node_match[static_cast<std::size_t>(sim.edges[k].second)];
    bool ok = false;
    if (a >= 0 && b >= 0 && a != b) {
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = std::lower_bound(oracle_edges.begin(), oracle_edges.end(), key);
      if (it != oracle_edges.end() && *it == key) {
        ok = true;
        hit[static_cast<std::size_t>(it - oracle_edges.begin())] = 1;
      }
    }
    if (ok) {
      ++matched;
    } else {
      r.unmatched.push_back(k);
    }
  }
  r.precision = sim.edges.empty() ? 1.0 : static_cast<double>(matched) / static_cast<double>(sim.edges.size());
  const auto hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  r.recall = oracle_edges.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(oracle_edges.size());
  return r;
}

inline EdgeMatch edge_match(const TubeGraph& sim, const PlanarGraph& oracle, double node_tol) {
  return edge_match(view_of(sim), view_of(oracle), node_tol);
}

/// Three cell widths.
inline double default_node_tolerance(double cell_size) { return 3.0 * cell_size; }

/// Nodes of `g` at each site (within half a cell diagonal), all in one live component.
inline bool spans_sites(const TubeGraph& g, std::span<const Point> sites) {
  const auto label = live_components(g);
  const GridSpec spec{1, 1, g.cell_size};
  const double tol = g.cell_size * kSqrt2 / 2.0 + 1e-9;
  int comp = -1;
  for (const Point& s : sites) {
    bool found = false;
    for (const auto& n : g.nodes) {
      if (distance(cell_center(spec, n.position), s) > tol) continue;
      const int c = label[static_cast<std::size_t>(n.id)];
      if (comp < 0) comp = c;
      if (c == comp) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

/// Live tube length over the Euclidean MST length of the sites.
inline double tree_length_ratio(const TubeGraph& sim, std::span<const Point> sites) {
  if (sites.size() < 2) throw std::invalid_argument("tree_length_ratio: need at least two sites");
  if (!spans_sites(sim, sites)) throw std::invalid_argument("tree_length_ratio: graph does not span all sites");
  return sim.live_length() / euclidean_mst(sites).total_length();
}

/// Simulated path length over the oracle shortest path, both in millimetres.
inline double path_ratio(double sim_path_length, const MazeGrid& maze, double cell_size = 1.0) {
  const auto best = grid_shortest_path(maze);
  if (!best) throw std::invalid_argument("path_ratio: goal unreachable in oracle maze");
  if (best->cost == 0.0) throw std::invalid_argument("path_ratio: start equals goal");
  return sim_path_length / (best->cost * cell_size);
}

// ---------------------------------------------------------------------------
// Morphology

enum class Quadrant { Creative, SavantAutism, SevereAutism, Schizophrenic };

inline const char* to_string(Quadrant q) {
  switch (q) {
    case Quadrant::Creative: return "Creative";
    case Quadrant::SavantAutism: return "SavantAutism";
    case Quadrant::SevereAutism: return "SevereAutism";
    case Quadrant::Schizophrenic: return "Schizophrenic";
  }
  return "?";
}

struct QuadrantThresholds {
  double degree_split = 3.0;
  double order_split = 0.5;
};

inline double mean_degree(const GraphView& g) {
  if (g.nodes.empty()) throw std::invalid_argument("mean_degree: empty graph");
  return 2.0 * static_cast<double>(g.edges.size()) / static_cast<double>(g.nodes.size());
}

/// 1 / (1 + coefficient of variation of edge lengths).
inline double order_score(const GraphView& g) {
  if (g.lengths.empty()) throw std::invalid_argument("order_score: graph has no edges");
  const double n = static_cast<double>(g.lengths.size());
  double mean = 0.0;
  for (double l : g.lengths) mean += l;
  mean /= n;
  double var = 0.0;
  for (double l : g.lengths) var += (l - mean) * (l - mean);
  var /= n;
  if (mean <= 0.0) return 1.0;
  return 1.0 / (1.0 + std::sqrt(var) / mean);
}

template <typename G>
double mean_degree(const G& g) { return mean_degree(view_of(g)); }
template <typename G>
double order_score(const G& g) { return order_score(view_of(g)); }

inline Quadrant classify_quadrant(double degree, double order, QuadrantThresholds t = {}) {
  if (!std::isfinite(t.degree_split) || !std::isfinite(t.order_split))
    throw std::invalid_argument("classify_quadrant: thresholds must be finite");
  const bool high_degree = degree >= t.degree_split;
  const bool high_order = order >= t.order_split;
  if (high_degree) return high_order ? Quadrant::Creative : Quadrant::Schizophrenic;
  return high_order ? Quadrant::SavantAutism : Quadrant::SevereAutism;
}

struct MorphologyReport {
  double mean_degree = 0.0;
  double order_score = 0.0;
  Quadrant quadrant = Quadrant::SevereAutism;
};

template <typename G>
MorphologyReport morphology(const G& g, QuadrantThresholds t = {}) {
  const GraphView v = view_of(g);
  MorphologyReport r;
  r.mean_degree = mean_degree(v);
  r.order_score = v.lengths.empty() ? 0.0 : order_score(v);
  r.quadrant = classify_quadrant(r.mean_degree, r.order_score, t);
  return r;
}

// ---------------------------------------------------------------------------
// Self-avoidance

/// P(fresh cell chosen | abandoned tube and fresh cell both admissible) - 0.5,
/// or nullopt without qualifying steps.
inline std::optional<double> self_avoidance_index(std::span<const ChoiceRecord> choices) {
  if (choices.empty()) return std::nullopt;
  const auto fresh = std::count_if(choices.begin(), choices.end(), [](const ChoiceRecord& c) { return c.fresh_chosen; });
  return static_cast<double>(fresh) / static_cast<double>(choices.size()) - 0.5;
}

struct ComparisonReport {
  std::optional<double> bisector_coverage;
  std::optional<double> edge_precision;
  std::optional<double> edge_recall;
  std::optional<double> tree_length_ratio;
  std::optional<double> path_ratio;
  std::optional<double> self_avoidance_index;
};

}  // namespace physarum
