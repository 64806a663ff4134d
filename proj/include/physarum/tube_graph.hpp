#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "physarum/grid.hpp"

namespace physarum {

enum class NodeKind : std::uint8_t { Inoculation, Branch, Food, Tip };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Inoculation: return "inoculation";
    case NodeKind::Branch: return "branch";
    case NodeKind::Food: return "food";
    case NodeKind::Tip: return "tip";
  }
  return "?";
}

struct TubeNode {
  int id = -1;
  Cell position;
  NodeKind kind = NodeKind::Branch;

  friend bool operator==(const TubeNode&, const TubeNode&) = default;
};

struct TubeEdge {
  static constexpr int kOpen = -1;

  int id = -1;
  int a = -1;
  int b = kOpen;  // kOpen while a zone is still extending the edge
  int owner = -1;
  std::vector<Cell> polyline;
  double length = 0.0;  // millimetres
  bool abandoned = false;
  int visits = 1;

  bool open() const { return b == kOpen; }
  friend bool operator==(const TubeEdge&, const TubeEdge&) = default;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Planar graph of protoplasmic tubes. Node and edge ids equal their index.
struct TubeGraph {
  double cell_size = 1.0;
  std::vector<TubeNode> nodes;
  std::vector<TubeEdge> edges;

  int add_node(Cell c, NodeKind kind) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({id, c, kind});
    return id;
  }

  std::size_t live_edge_count() const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [](const TubeEdge& e) { return !e.abandoned; }));
  }
  std::size_t count_nodes(NodeKind k) const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [k](const TubeNode& n) { return n.kind == k; }));
  }
  double live_length() const {
    double sum = 0.0;
    for (const auto& e : edges)
      if (!e.abandoned) sum += e.length;
    return sum;
  }

  friend bool operator==(const TubeGraph&, const TubeGraph&) = default;
};

/// Length of an 8-connected polyline in millimetres.
inline double polyline_length(const std::vector<Cell>& poly, double cell_size) {
  double sum = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) {
    const int d = direction_between(poly[i - 1], poly[i]);
    sum += d < 0 ? std::hypot(poly[i].x - poly[i - 1].x, poly[i].y - poly[i - 1].y) : step_length(d);
  }
  return sum * cell_size;
}

/// Throws InvariantViolation if the graph is internally inconsistent. Open
/// edges are rejected: callers close them first.
inline void check_tube_graph(const TubeGraph& g) {
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].id != static_cast<int>(i)) throw InvariantViolation("node id does not match its index");
  const int n = static_cast<int>(g.nodes.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const TubeEdge& e = g.edges[i];
    const std::string tag = "edge " + std::to_string(i);
    if (e.id != static_cast<int>(i)) throw InvariantViolation(tag + ": id does not match its index");
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) throw InvariantViolation(tag + ": dangling node reference");
    if (e.a == e.b) throw InvariantViolation(tag + ": self-loop");
    if (e.polyline.size() < 2) throw InvariantViolation(tag + ": polyline shorter than two cells");
    if (e.polyline.front() != g.nodes[static_cast<std::size_t>(e.a)].position ||
        e.polyline.back() != g.nodes[static_cast<std::size_t>(e.b)].position)
      throw InvariantViolation(tag + ": polyline endpoints do not coincide with node positions");
    for (std::size_t k = 1; k < e.polyline.size(); ++k)
      if (direction_between(e.polyline[k - 1], e.polyline[k]) < 0)
        throw InvariantViolation(tag + ": consecutive polyline cells are not 8-neighbours");
    if (std::abs(polyline_length(e.polyline, g.cell_size) - e.length) > 1e-9 * std::max(1.0, e.length))
      throw InvariantViolation(tag + ": stored length differs from polyline length");
  }
}

namespace detail {

// Direction (dx, dy) of the chord from `from` to the cell `steps` along the polyline.
inline void chord(const std::vector<Cell>& poly, bool from_front, int steps, double& dx, double& dy) {
  const std::size_t k = std::min(poly.size() - 1, static_cast<std::size_t>(steps));
  const Cell a = from_front ? poly.front() : poly.back();
  const Cell b = from_front ? poly[k] : poly[poly.size() - 1 - k];
  dx = b.x - a.x;
  dy = b.y - a.y;
}

}  // namespace detail

/// Fuses degree-2 Branch nodes whose two incident polylines continue in
/// roughly the same direction (chords over three cells within 45 degrees),
/// then compacts ids. Applying it twice gives the same graph.
inline TubeGraph canonicalize(TubeGraph g) {
  constexpr int kChordSteps = 3;
  const double cos_limit = std::cos(std::acos(-1.0) / 4.0) - 1e-12;
  std::vector<char> node_dead(g.nodes.size(), 0);
  std::vector<char> edge_dead(g.edges.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<int>> incident(g.nodes.size());
    for (const auto& e : g.edges) {
      if (edge_dead[static_cast<std::size_t>(e.id)]) continue;
      incident[static_cast<std::size_t>(e.a)].push_back(e.id);
      incident[static_cast<std::size_t>(e.b)].push_back(e.id);
    }
    for (const auto& node : g.nodes) {
      const auto v = static_cast<std::size_t>(node.id);
      if (node_dead[v] || node.kind != NodeKind::Branch || incident[v].size() != 2) continue;
      TubeEdge& e1 = g.edges[static_cast<std::size_t>(incident[v][0])];
      TubeEdge& e2 = g.edges[static_cast<std::size_t>(incident[v][1])];
      if (e1.id == e2.id || e1.abandoned != e2.abandoned) continue;
      const int other1 = e1.a == node.id ? e1.b : e1.a;
      const int other2 = e2.a == node.id ? e2.b : e2.a;
      if (other1 == other2) continue;
      // Orient e1 to end at the node, e2 to start there.
      std::vector<Cell> p1 = e1.polyline, p2 = e2.polyline;
      if (e1.a == node.id) std::reverse(p1.begin(), p1.end());
      if (e2.b == node.id) std::reverse(p2.begin(), p2.end());
      double ix, iy, ox, oy;
      detail::chord(p1, false, kChordSteps, ix, iy);  // node -> back along e1
      detail::chord(p2, true, kChordSteps, ox, oy);   // node -> forward along e2
      const double norm = std::hypot(ix, iy) * std::hypot(ox, oy);
      if (norm == 0.0) continue;
      // Incoming direction is -i; collinear when -i and o agree.
      const double cosang = (-ix * ox - iy * oy) / norm;
      if (cosang < cos_limit) continue;
      p1.insert(p1.end(), p2.begin() + 1, p2.end());
      e1.a = other1;
      e1.b = other2;
      e1.polyline = std::move(p1);
      e1.length = polyline_length(e1.polyline, g.cell_size);
      e1.visits = std::max(e1.visits, e2.visits);
      edge_dead[static_cast<std::size_t>(e2.id)] = 1;
      node_dead[v] = 1;
      changed = true;
      break;
    }
  }
  TubeGraph out;
  out.cell_size = g.cell_size;
  std::vector<int> remap(g.nodes.size(), -1);
  for (const auto& node : g.nodes) {
    if (node_dead[static_cast<std::size_t>(node.id)]) continue;
    remap[static_cast<std::size_t>(node.id)] = out.add_node(node.position, node.kind);
  }
  for (const auto& e : g.edges) {
    if (edge_dead[static_cast<std::size_t>(e.id)]) continue;
    TubeEdge c = e;
    c.id = static_cast<int>(out.edges.size());
    c.a = remap[static_cast<std::size_t>(e.a)];
    c.b = remap[static_cast<std::size_t>(e.b)];
    out.edges.push_back(std::move(c));
  }
  return out;
}

/// True when the non-abandoned subgraph contains no cycle.
inline bool is_acyclic(const TubeGraph& g) {
  std::vector<int> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (const auto& e : g.edges) {
    if (e.abandoned) continue;
    const int a = find(e.a), b = find(e.b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
  }
  return true;
}

/// Connected-component label per node over non-abandoned edges.
inline std::vector<int> live_components(const TubeGraph& g) {
  std::vector<int> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (const auto& e : g.edges)
    if (!e.abandoned) parent[static_cast<std::size_t>(find(e.a))] = find(e.b);
  std::vector<int> label(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) label[i] = find(static_cast<int>(i));
  return label;
}

/// Shortest live-tube distance (millimetres) between two nodes; negative if disconnected.
inline double tube_distance(const TubeGraph& g, int from, int to) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.nodes.size(), inf);
  std::vector<char> done(g.nodes.size(), 0);
  dist[static_cast<std::size_t>(from)] = 0.0;
  for (std::size_t iter = 0; iter < g.nodes.size(); ++iter) {
    int u = -1;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (!done[i] && dist[i] < inf && (u < 0 || dist[i] < dist[static_cast<std::size_t>(u)])) u = static_cast<int>(i);
    if (u < 0) break;
    done[static_cast<std::size_t>(u)] = 1;
    for (const auto& e : g.edges) {
      if (e.abandoned || (e.a != u && e.b != u)) continue;
      const int v = e.a == u ? e.b : e.a;
      dist[static_cast<std::size_t>(v)] = std::min(dist[static_cast<std::size_t>(v)], dist[static_cast<std::size_t>(u)] + e.length);
    }
  }
  return dist[static_cast<std::size_t>(to)] < inf ? dist[static_cast<std::size_t>(to)] : -1.0;
}

}  // namespace physarum
