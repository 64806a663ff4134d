#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "physarum/environment.hpp"
#include "physarum/grid.hpp"
#include "physarum/rng.hpp"
#include "physarum/tube_graph.hpp"

namespace physarum {

// ---------------------------------------------------------------------------
// State types

enum class Tag : std::uint8_t {
  Empty,
  Front,          // claimed by a wave and still expanding
  Occupied,       // claimed by a wave
  Tube,           // part of a live tube edge
  AbandonedTube,  // collapsed tube, stays on the substrate
  Blocked,        // wave-collision locus; reads as empty and is never claimed
};

struct CellState {
  Tag tag = Tag::Empty;
  std::int32_t ref = -1;  // owner for Front/Occupied, edge id for Tube/AbandonedTube

  bool plasmodium() const { return tag == Tag::Front || tag == Tag::Occupied || tag == Tag::Tube || tag == Tag::AbandonedTube; }
  bool empty() const { return tag == Tag::Empty || tag == Tag::Blocked; }
  friend bool operator==(const CellState&, const CellState&) = default;
};

struct ActiveZone {
  int id = -1;
  int owner = -1;  // inoculation-site index that grew it
  Cell position;
  int heading = 0;  // compass index
  double activity = 1.0;
  int tail_node = -1;
  int edge = -1;  // open edge being extended, or -1 while sitting on a node
  bool alive = true;
  bool relocating = false;  // spawned after its food ran out; keeps moving without a gradient
  int feeding_source = -1;  // parked on a consumable source while it lasts
  int riding_edge = -1;     // continuation mode: edge currently being re-traversed
  int cooldown = 0;         // ticks until the zone may branch again

  friend bool operator==(const ActiveZone&, const ActiveZone&) = default;
};

/// Attractant and repellent fields kept per source; linear diffusion lets the
/// engine subtract the sources a plasmodium has already colonized.
struct FieldSet {
  std::vector<ChemicalField> per_source;

  ChemicalField total(const GridSpec& g, Species s) const {
    ChemicalField out(g, s);
    for (const auto& f : per_source) {
      if (f.species != s) continue;
      for (std::size_t i = 0; i < f.concentration.size(); ++i) out.concentration.at(i) += f.concentration.at(i);
    }
    return out;
  }
  friend bool operator==(const FieldSet&, const FieldSet&) = default;
};

struct ChoiceRecord {
  int tick = 0;
  int zone = 0;
  bool fresh_chosen = false;
  friend bool operator==(const ChoiceRecord&, const ChoiceRecord&) = default;
};

struct PlasmodiumState {
  Grid<CellState> occupancy;
  Grid<std::int32_t> node_at;  // node id per cell or -1
  std::vector<ActiveZone> zones;
  TubeGraph graph;
  std::vector<StimulusSource> sources;
  std::vector<std::vector<int>> colonizers;  // owners that colonized each source
  std::vector<int> source_node;              // node id per source or -1
  std::vector<char> relocated;               // depletion already handled
  std::vector<int> owner_parent;             // union-find over inoculation owners
  std::vector<Cell> origins;                 // inoculation site per owner
  FieldSet fields;
  std::vector<ChoiceRecord> choices;
  int tick = 0;
  bool spanning_complete = false;
  bool continuation_active = false;
  std::uint64_t seed = 0;
  int branch_events = 0;
  int merge_events = 0;
  int revisit_events = 0;

  int component(int owner) const {
    while (owner_parent[static_cast<std::size_t>(owner)] != owner) owner = owner_parent[static_cast<std::size_t>(owner)];
    return owner;
  }
  std::size_t live_zone_count() const {
    return static_cast<std::size_t>(std::count_if(zones.begin(), zones.end(), [](const ActiveZone& z) { return z.alive; }));
  }
  std::size_t colonized_count() const {
    return static_cast<std::size_t>(std::count_if(sources.begin(), sources.end(), [](const StimulusSource& s) { return s.colonized; }));
  }
  std::size_t occupied_count() const {
    return static_cast<std::size_t>(std::count_if(occupancy.data().begin(), occupancy.data().end(),
                                                  [](const CellState& c) { return c.plasmodium(); }));
  }
  std::size_t component_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < owner_parent.size(); ++i) n += owner_parent[i] == static_cast<int>(i);
    return n;
  }

  friend bool operator==(const PlasmodiumState&, const PlasmodiumState&) = default;
};

struct TickSummary {
  int tick = 0;
  int zones = 0;
  int occupied = 0;
  int colonized = 0;
  friend bool operator==(const TickSummary&, const TickSummary&) = default;
};

enum class StopCondition { MaxTicks, AllSourcesColonized, SingleZoneRemaining, Connected, WavesSettled };

struct RunResult {
  PlasmodiumState state;
  std::vector<TickSummary> trace;
  bool complete = false;  // stop condition reached within max_ticks
};

// ---------------------------------------------------------------------------
// Internals

namespace detail {

inline bool colonized_by(const PlasmodiumState& st, std::size_t source, int comp) {
  for (int o : st.colonizers[source])
    if (st.component(o) == comp) return true;
  return false;
}

// Stimulus sensed by a plasmodium component: the strongest attractant it has
// not colonized yet, minus every repellent. Taking the strongest rather than
// the sum keeps two baits in different directions distinguishable.
inline double sensed_stimulus(const PlasmodiumState& st, const EngineParams& p, int comp, Cell c) {
  double attract = 0.0, repel = 0.0;
  for (std::size_t i = 0; i < st.sources.size(); ++i) {
    const ChemicalField& f = st.fields.per_source[i];
    if (st.sources[i].kind == Species::Attractant) {
      if (colonized_by(st, i, comp)) continue;
      attract = std::max(attract, f[c]);
    } else {
      repel += f[c];
    }
  }
  return p.attractant_weight * attract - p.repellent_weight * repel;
}

// Steering uses log concentrations: the response depends on relative, not
// absolute, changes, so faint far-field gradients steer as well as strong ones.
inline double perceived_stimulus(const PlasmodiumState& st, const EngineParams& p, int comp, Cell c) {
  constexpr double kFloor = 1e-300;
  double attract = 0.0, repel = 0.0;
  for (std::size_t i = 0; i < st.sources.size(); ++i) {
    const ChemicalField& f = st.fields.per_source[i];
    if (st.sources[i].kind == Species::Attractant) {
      if (colonized_by(st, i, comp)) continue;
      attract = std::max(attract, f[c]);
    } else {
      repel += f[c];
    }
  }
  return p.attractant_weight * std::log(std::max(attract, kFloor)) - p.repellent_weight * std::log(std::max(repel, kFloor));
}

inline int source_at(const PlasmodiumState& st, Cell c) {
  for (std::size_t i = 0; i < st.sources.size(); ++i)
    if (st.sources[i].position == c) return static_cast<int>(i);
  return -1;
}

inline void unite(PlasmodiumState& st, int a, int b) {
  a = st.component(a);
  b = st.component(b);
  if (a == b) return;
  if (b < a) std::swap(a, b);
  st.owner_parent[static_cast<std::size_t>(b)] = a;
  ++st.merge_events;
}

inline int edge_owner(const PlasmodiumState& st, int edge) {
  return st.graph.edges[static_cast<std::size_t>(edge)].owner;
}

// Owner of whatever plasmodium occupies the cell, or -1.
inline int cell_owner(const PlasmodiumState& st, Cell c) {
  const CellState& cs = st.occupancy[c];
  switch (cs.tag) {
    case Tag::Front:
    case Tag::Occupied: return cs.ref;
    case Tag::Tube:
    case Tag::AbandonedTube: return edge_owner(st, cs.ref);
    default: return -1;
  }
}

inline void retag_edge_cells(PlasmodiumState& st, const TubeEdge& e, Tag tag) {
  for (Cell c : e.polyline) {
    CellState& cs = st.occupancy[c];
    if ((cs.tag == Tag::Tube || cs.tag == Tag::AbandonedTube) && cs.ref == e.id) cs.tag = tag;
  }
}

// Returns the node at `c`, splitting the tube edge through `c` if needed.
inline int ensure_node_at(PlasmodiumState& st, Cell c, NodeKind kind) {
  if (const int n = st.node_at[c]; n >= 0) return n;
  const CellState cs = st.occupancy[c];
  const int node = st.graph.add_node(c, kind);
  st.node_at[c] = node;
  if (cs.tag != Tag::Tube && cs.tag != Tag::AbandonedTube) return node;
  const int eid = cs.ref;
  TubeEdge& e = st.graph.edges[static_cast<std::size_t>(eid)];
  auto it = std::find(e.polyline.begin(), e.polyline.end(), c);
  if (it == e.polyline.end()) throw InvariantViolation("tube cell missing from its edge polyline");
  const auto k = static_cast<std::size_t>(it - e.polyline.begin());
  if (k == 0 || k + 1 == e.polyline.size()) return node;  // endpoint of an open edge
  TubeEdge tail;
  tail.id = static_cast<int>(st.graph.edges.size());
  tail.a = node;
  tail.b = e.b;
  tail.owner = e.owner;
  tail.abandoned = e.abandoned;
  tail.visits = e.visits;
  tail.polyline.assign(e.polyline.begin() + static_cast<std::ptrdiff_t>(k), e.polyline.end());
  tail.length = polyline_length(tail.polyline, st.graph.cell_size);
  e.polyline.resize(k + 1);
  e.length = polyline_length(e.polyline, st.graph.cell_size);
  e.b = node;
  const int old_id = e.id;
  st.graph.edges.push_back(std::move(tail));
  const TubeEdge& t = st.graph.edges.back();
  for (std::size_t i = 1; i < t.polyline.size(); ++i) {
    CellState& s = st.occupancy[t.polyline[i]];
    if ((s.tag == Tag::Tube || s.tag == Tag::AbandonedTube) && s.ref == old_id) s.ref = t.id;
  }
  for (auto& z : st.zones)
    if (z.edge == old_id) z.edge = t.id;
  return node;
}

// Closes the zone's open edge at `node` (or creates the one-step edge when
// the zone was sitting on a node).
inline void close_edge_at(PlasmodiumState& st, ActiveZone& z, int node) {
  const Cell target = st.graph.nodes[static_cast<std::size_t>(node)].position;
  if (z.edge >= 0) {
    TubeEdge& e = st.graph.edges[static_cast<std::size_t>(z.edge)];
    if (e.polyline.back() != target) {
      e.polyline.push_back(target);
      e.length = polyline_length(e.polyline, st.graph.cell_size);
    }
    e.b = node;
  } else if (node != z.tail_node) {
    TubeEdge e;
    e.id = static_cast<int>(st.graph.edges.size());
    e.a = z.tail_node;
    e.b = node;
    e.owner = z.owner;
    e.polyline = {st.graph.nodes[static_cast<std::size_t>(z.tail_node)].position, target};
    e.length = polyline_length(e.polyline, st.graph.cell_size);
    st.graph.edges.push_back(std::move(e));
    CellState& cs = st.occupancy[target];
    if (!(cs.tag == Tag::Tube)) cs = {Tag::Tube, st.graph.edges.back().id};
  }
  z.edge = -1;
  z.tail_node = node;
}

inline void extend_edge(PlasmodiumState& st, ActiveZone& z, Cell to) {
  if (z.edge < 0) {
    TubeEdge e;
    e.id = static_cast<int>(st.graph.edges.size());
    e.a = z.tail_node;
    e.owner = z.owner;
    e.polyline = {st.graph.nodes[static_cast<std::size_t>(z.tail_node)].position};
    st.graph.edges.push_back(std::move(e));
    z.edge = st.graph.edges.back().id;
    CellState& start = st.occupancy[st.graph.edges.back().polyline.front()];
    if (start.tag != Tag::Tube) start = {Tag::Tube, z.edge};
  }
  TubeEdge& e = st.graph.edges[static_cast<std::size_t>(z.edge)];
  e.length += step_length(direction_between(e.polyline.back(), to)) * st.graph.cell_size;
  e.polyline.push_back(to);
  st.occupancy[to] = {Tag::Tube, z.edge};
}

// Zone death: an open edge is closed with a Tip node and abandoned.
inline void kill_zone(PlasmodiumState& st, ActiveZone& z) {
  z.alive = false;
  z.activity = 0.0;
  if (z.edge >= 0) {
    const int tip = st.graph.add_node(z.position, NodeKind::Tip);
    st.node_at[z.position] = tip;
    TubeEdge& e = st.graph.edges[static_cast<std::size_t>(z.edge)];
    e.b = tip;
    e.abandoned = true;
    retag_edge_cells(st, e, Tag::AbandonedTube);
    z.edge = -1;
    z.tail_node = tip;
  }
}

inline bool all_attractants_colonized(const PlasmodiumState& st) {
  for (const auto& s : st.sources)
    if (s.kind == Species::Attractant && !s.colonized) return false;
  return true;
}

inline void colonize(PlasmodiumState& st, ActiveZone& z, int src) {
  auto& s = st.sources[static_cast<std::size_t>(src)];
  int node = st.source_node[static_cast<std::size_t>(src)];
  if (node < 0) {
    node = ensure_node_at(st, s.position, NodeKind::Food);
    st.source_node[static_cast<std::size_t>(src)] = node;
  }
  close_edge_at(st, z, node);
  s.colonized = true;
  st.colonizers[static_cast<std::size_t>(src)].push_back(z.owner);
  if (s.consumable && !s.depleted()) z.feeding_source = src;
}

struct NeighbourScores {
  std::array<double, 8> score{};
  std::array<char, 8> admissible{};
  std::array<double, 8> slope{};
  bool any = false;
  bool signal = false;
};

inline bool riding_mode(const PlasmodiumState& st, const ActiveZone& z) {
  return st.continuation_active && z.edge < 0;
}

inline NeighbourScores score_neighbours(const PlasmodiumState& st, const Scene& scene, const ActiveZone& z,
                                        std::uint64_t salt) {
  const EngineParams& p = scene.params;
  const int comp = st.component(z.owner);
  const bool embedded = scene.nutrient_rich(z.position);
  const Cell tail_pos = st.graph.nodes[static_cast<std::size_t>(z.tail_node)].position;
  NeighbourScores out;
  const double here = perceived_stimulus(st, p, comp, z.position);
  double max_abs = 0.0;
  for (int d = 0; d < 8; ++d) {
    const Cell n{z.position.x + kCompass[d].x, z.position.y + kCompass[d].y};
    if (!scene.grid.contains(n) || scene.substrate.is_wall(n)) continue;
    const CellState& cs = st.occupancy[n];
    if (z.edge >= 0 && (n == tail_pos || (cs.tag == Tag::Tube && cs.ref == z.edge))) continue;
    const int owner = cell_owner(st, n);
    const bool foreign = owner >= 0 && st.component(owner) != comp;
    const bool own = owner >= 0 && !foreign;
    if ((cs.tag == Tag::Front || cs.tag == Tag::Occupied) && foreign && st.node_at[n] < 0) continue;
    // The plasmodium's own live network is closed to growth; it is only re-entered in continuation mode.
    if (own && cs.tag == Tag::Tube && !st.continuation_active) continue;
    if (own && (cs.tag == Tag::Front || cs.tag == Tag::Occupied) && !(embedded && scene.nutrient_rich(n))) continue;
    if (embedded && scene.nutrient_rich(n) && !own) continue;
    out.admissible[static_cast<std::size_t>(d)] = 1;
    out.any = true;
    const double slope = (perceived_stimulus(st, p, comp, n) - here) / step_length(d);
    out.slope[static_cast<std::size_t>(d)] = slope;
    max_abs = std::max(max_abs, std::abs(slope));
  }
  out.signal = max_abs > 0.0;
  const CounterRng rng(st.seed);
  for (int d = 0; d < 8; ++d) {
    const auto k = static_cast<std::size_t>(d);
    if (!out.admissible[k]) continue;
    const Cell n{z.position.x + kCompass[d].x, z.position.y + kCompass[d].y};
    double s = out.signal ? out.slope[k] / max_abs : 0.0;
    s += p.momentum * direction_alignment(z.heading, d);
    s += p.noise_amplitude * rng.symmetric(static_cast<std::uint64_t>(st.tick), (static_cast<std::uint64_t>(z.id) << 8) | k, salt);
    const CellState& cs = st.occupancy[n];
    if (cs.tag == Tag::AbandonedTube) {
      s -= p.self_avoid_penalty;
    } else if (cs.tag == Tag::Tube && st.component(edge_owner(st, cs.ref)) == comp) {
      s += p.self_avoid_penalty;  // reachable only in continuation mode
    }
    out.score[k] = s;
  }
  return out;
}

// Best direction and the best one at least 90 degrees away from it, when the
// zone qualifies for a binary branch; {-1, -1} otherwise.
inline std::pair<int, int> branch_choice(const PlasmodiumState& st, const Scene& scene, const ActiveZone& z,
                                         const NeighbourScores& ns) {
  const EngineParams& p = scene.params;
  if (st.continuation_active || !z.alive || z.feeding_source >= 0 || z.cooldown > 0 ||
      scene.nutrient_rich(z.position) || !ns.signal || static_cast<int>(st.live_zone_count()) >= p.max_zones)
    return {-1, -1};
  int best = -1;
  for (int d = 0; d < 8; ++d) {
    const auto k = static_cast<std::size_t>(d);
    if (ns.admissible[k] && (best < 0 || ns.score[k] > ns.score[static_cast<std::size_t>(best)])) best = d;
  }
  if (best < 0) return {-1, -1};
  int second = -1;
  for (int d = 0; d < 8; ++d) {
    const auto k = static_cast<std::size_t>(d);
    if (!ns.admissible[k] || direction_separation(best, d) < 2) continue;
    if (second < 0 || ns.score[k] > ns.score[static_cast<std::size_t>(second)]) second = d;
  }
  if (second < 0) return {-1, -1};
  const double bs = ns.score[static_cast<std::size_t>(best)];
  const double ss = ns.score[static_cast<std::size_t>(second)];
  if (!(bs > 0.0) || ss < p.branch_ratio * bs) return {-1, -1};
  return {best, second};
}

// Moves the zone one cell in `dir`, updating the tube graph: merging into
// nodes and tubes, riding its own network in continuation mode, and
// colonizing food on arrival.
inline void move_zone(PlasmodiumState& st, ActiveZone& z, int dir) {
  const Cell to{z.position.x + kCompass[dir].x, z.position.y + kCompass[dir].y};
  const CellState target = st.occupancy[to];
  const int target_owner = cell_owner(st, to);
  const int comp = st.component(z.owner);
  const bool own_live_tube = target.tag == Tag::Tube && st.component(target_owner) == comp &&
                             !st.graph.edges[static_cast<std::size_t>(target.ref)].abandoned;
  const int node_here = st.node_at[to];

  if (riding_mode(st, z) && (own_live_tube || (node_here >= 0 && target_owner >= 0 && st.component(target_owner) == comp))) {
    // Re-traversal of the established network.
    if (node_here < 0 && target.ref != z.riding_edge) {
      st.graph.edges[static_cast<std::size_t>(target.ref)].visits++;
      st.revisit_events++;
      z.riding_edge = target.ref;
    }
    if (node_here >= 0) z.tail_node = node_here;
  } else {
    if (riding_mode(st, z) && st.node_at[z.position] < 0) {
      // Leaving the network mid-tube: the departure point becomes a branch.
      z.tail_node = ensure_node_at(st, z.position, NodeKind::Branch);
    }
    z.riding_edge = -1;
    if (node_here >= 0) {
      close_edge_at(st, z, node_here);
      if (target_owner >= 0) unite(st, z.owner, target_owner);
    } else if (target.tag == Tag::Tube) {
      const int branch = ensure_node_at(st, to, NodeKind::Branch);
      close_edge_at(st, z, branch);
      unite(st, z.owner, target_owner);
    } else {
      extend_edge(st, z, to);
    }
  }
  z.position = to;
  z.heading = dir;
  if (z.cooldown > 0) --z.cooldown;

  if (const int src = source_at(st, to); src >= 0) {
    const auto& s = st.sources[static_cast<std::size_t>(src)];
    if (s.kind == Species::Attractant && !colonized_by(st, static_cast<std::size_t>(src), st.component(z.owner)))
      colonize(st, z, src);
  }
}

inline int argmax_direction(const NeighbourScores& ns) {
  int best = -1;
  for (int d = 0; d < 8; ++d) {
    const auto k = static_cast<std::size_t>(d);
    if (!ns.admissible[k]) continue;
    if (best < 0 || ns.score[k] > ns.score[static_cast<std::size_t>(best)]) best = d;
  }
  return best;
}

inline double stimulus_potential(const PlasmodiumState& st, int owner, Cell c) {
  double v = 0.0;
  const int comp = st.component(owner);
  for (std::size_t i = 0; i < st.sources.size(); ++i) {
    const auto& s = st.sources[i];
    if (s.kind == Species::Attractant && colonized_by(st, i, comp)) continue;
    const double dx = c.x - s.position.x, dy = c.y - s.position.y;
    const double w = s.strength / (1.0 + dx * dx + dy * dy);
    v += s.kind == Species::Attractant ? w : -w;
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations

/// Inoculates every site: one Inoculation node, one occupied cell and one
/// active zone per site. Initial headings point at the strongest nearby
/// stimulus source (ties: lowest compass index).
inline PlasmodiumState init_plasmodium(const Scene& scene) {
  PlasmodiumState st;
  st.occupancy = Grid<CellState>(scene.grid);
  st.node_at = Grid<std::int32_t>(scene.grid, -1);
  st.graph.cell_size = scene.grid.cell_size;
  st.sources = scene.sources;
  st.colonizers.assign(scene.sources.size(), {});
  st.source_node.assign(scene.sources.size(), -1);
  st.relocated.assign(scene.sources.size(), 0);
  st.seed = scene.params.seed;
  for (const auto& s : scene.sources) st.fields.per_source.emplace_back(scene.grid, s.kind);

  const int n = static_cast<int>(scene.inoculation_sites.size());
  st.owner_parent.resize(static_cast<std::size_t>(n));
  std::iota(st.owner_parent.begin(), st.owner_parent.end(), 0);
  st.origins = scene.inoculation_sites;
  for (int i = 0; i < n; ++i) {
    const Cell c = scene.inoculation_sites[static_cast<std::size_t>(i)];
    const int node = st.graph.add_node(c, NodeKind::Inoculation);
    st.node_at[c] = node;
    st.occupancy[c] = {scene.nutrient_rich(c) ? Tag::Front : Tag::Occupied, i};
    if (const int src = detail::source_at(st, c); src >= 0 && st.sources[static_cast<std::size_t>(src)].kind == Species::Attractant) {
      st.sources[static_cast<std::size_t>(src)].colonized = true;
      st.colonizers[static_cast<std::size_t>(src)].push_back(i);
      st.source_node[static_cast<std::size_t>(src)] = node;
    }
  }
  for (int i = 0; i < n; ++i) {
    ActiveZone z;
    z.id = i;
    z.owner = i;
    z.position = scene.inoculation_sites[static_cast<std::size_t>(i)];
    z.tail_node = i;
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < 8; ++d) {
      const Cell nb{z.position.x + kCompass[d].x, z.position.y + kCompass[d].y};
      const double v = detail::stimulus_potential(st, i, nb);
      if (v > best_v) {
        best_v = v;
        best = d;
      }
    }
    z.heading = best;
    st.zones.push_back(z);
  }
  st.spanning_complete = detail::all_attractants_colonized(st);
  return st;
}

/// Deposits every source into its own field, then diffuses each field one tick.
inline void update_fields(PlasmodiumState& st, const Scene& scene) {
  for (std::size_t i = 0; i < st.sources.size(); ++i) {
    ChemicalField& f = st.fields.per_source[i];
    deposit_source(f, st.sources[i], scene.params.feeding_rate);
    const DiffusionParams& dp = scene.diffusion_for(st.sources[i].kind);
    ChemicalField next;
    diffuse_step_into(f, scene.substrate, dp.D, dp.lambda, next);
    f = std::move(next);
  }
}

/// Regime A: circular fronts over nutrient-rich cells. Each owner's disc has
/// radius wave_speed * (tick + 1) around its inoculation site; a cell reached
/// by two owners in the same pass, or touching another owner's territory,
/// becomes a permanent empty collision cell.
inline void step_wavefront(PlasmodiumState& st, const Scene& scene) {
  const double radius = scene.params.wave_speed * (st.tick + 1) + 1e-9;
  const auto& g = scene.grid;
  auto claimable = [&](Cell c) {
    return g.contains(c) && scene.nutrient_rich(c) && st.occupancy[c].tag == Tag::Empty;
  };
  for (;;) {
    // Proposals: cell index -> owner, or -2 when proposed by several owners.
    std::vector<std::pair<std::size_t, int>> proposals;
    for (std::size_t i = 0; i < st.occupancy.size(); ++i) {
      const CellState& cs = st.occupancy.at(i);
      if (cs.tag != Tag::Front) continue;
      const Cell c = g.cell_at(i);
      const Cell o = st.origins[static_cast<std::size_t>(cs.ref)];
      for (int d = 0; d < 8; ++d) {
        const Cell n{c.x + kCompass[d].x, c.y + kCompass[d].y};
        if (!claimable(n)) continue;
        if (std::hypot(n.x - o.x, n.y - o.y) > radius) continue;
        proposals.emplace_back(g.index(n), cs.ref);
      }
    }
    if (proposals.empty()) break;
    std::sort(proposals.begin(), proposals.end());
    std::vector<std::pair<std::size_t, int>> merged;
    for (const auto& [idx, owner] : proposals) {
      if (!merged.empty() && merged.back().first == idx) {
        if (merged.back().second != owner) merged.back().second = -2;
      } else {
        merged.emplace_back(idx, owner);
      }
    }
    auto proposed_owner = [&](std::size_t idx) {
      auto it = std::lower_bound(merged.begin(), merged.end(), std::make_pair(idx, std::numeric_limits<int>::min()));
      return (it != merged.end() && it->first == idx) ? it->second : -1;
    };
    std::vector<std::pair<std::size_t, CellState>> updates;
    updates.reserve(merged.size());
    for (const auto& [idx, owner] : merged) {
      bool collide = owner == -2;
      const Cell c = g.cell_at(idx);
      for (int d = 0; d < 8 && !collide; ++d) {
        const Cell n{c.x + kCompass[d].x, c.y + kCompass[d].y};
        if (!g.contains(n)) continue;
        const int existing = detail::cell_owner(st, n);
        if (existing >= 0 && existing != owner) collide = true;
        const int other = proposed_owner(g.index(n));
        if (other != -1 && other != owner) collide = true;
      }
      updates.emplace_back(idx, collide ? CellState{Tag::Blocked, -1} : CellState{Tag::Front, owner});
    }
    for (const auto& [idx, cs] : updates) st.occupancy.at(idx) = cs;
  }
  // Fronts with nothing left to claim settle.
  for (std::size_t i = 0; i < st.occupancy.size(); ++i) {
    CellState& cs = st.occupancy.at(i);
    if (cs.tag != Tag::Front) continue;
    const Cell c = g.cell_at(i);
    bool open = false;
    for (int d = 0; d < 8 && !open; ++d) open = claimable({c.x + kCompass[d].x, c.y + kCompass[d].y});
    if (!open) cs.tag = Tag::Occupied;
  }
}

/// Regime B: every live zone takes one chemotactic step. Zones on
/// nutrient-rich cells move only through their own territory and wait when
/// blocked; tube tips elsewhere die when no neighbour is admissible. A
/// foraging zone that senses no gradient waits in place.
inline void step_zones(PlasmodiumState& st, const Scene& scene) {
  const std::size_t count = st.zones.size();
  for (std::size_t zi = 0; zi < count; ++zi) {
    ActiveZone& z = st.zones[zi];
    if (!z.alive || z.feeding_source >= 0) continue;
    const bool embedded = scene.nutrient_rich(z.position);
    const detail::NeighbourScores ns = detail::score_neighbours(st, scene, z, 0);
    if (!ns.any) {
      if (!embedded) detail::kill_zone(st, z);
      continue;
    }
    if (!ns.signal && !z.relocating && !st.continuation_active) continue;
    // A tip facing a fork stays put; branch_zones splits it here.
    if (detail::branch_choice(st, scene, z, ns).first >= 0) continue;
    const int dir = detail::argmax_direction(ns);
    const Cell to{z.position.x + kCompass[dir].x, z.position.y + kCompass[dir].y};

    // Self-avoidance bookkeeping: was there a choice between a collapsed tube and fresh substrate?
    bool abandoned_option = false, fresh_option = false;
    for (int d = 0; d < 8; ++d) {
      if (!ns.admissible[static_cast<std::size_t>(d)]) continue;
      const Tag t = st.occupancy[Cell{z.position.x + kCompass[d].x, z.position.y + kCompass[d].y}].tag;
      abandoned_option = abandoned_option || t == Tag::AbandonedTube;
      fresh_option = fresh_option || t == Tag::Empty || t == Tag::Blocked;
    }
    if (abandoned_option && fresh_option) {
      const Tag t = st.occupancy[to].tag;
      st.choices.push_back({st.tick, z.id, t == Tag::Empty || t == Tag::Blocked});
    }

    detail::move_zone(st, z, dir);
  }
  st.spanning_complete = detail::all_attractants_colonized(st);
}

/// Binary branching: a tube tip whose second-best neighbour scores at least
/// branch_ratio times its best, at least 90 degrees away, splits in two.
inline void branch_zones(PlasmodiumState& st, const Scene& scene) {
  const EngineParams& p = scene.params;
  const std::size_t count = st.zones.size();
  for (std::size_t zi = 0; zi < count; ++zi) {
    ActiveZone& z = st.zones[zi];
    if (!z.alive) continue;
    const auto [best, second] = detail::branch_choice(st, scene, z, detail::score_neighbours(st, scene, z, 0));
    if (best < 0) continue;

    const int node = detail::ensure_node_at(st, z.position, NodeKind::Branch);
    detail::close_edge_at(st, z, node);
    z.heading = best;
    z.cooldown = p.branch_cooldown;
    ActiveZone child;
    child.id = static_cast<int>(st.zones.size());
    child.owner = z.owner;
    child.position = z.position;
    child.heading = second;
    child.activity = z.activity * 0.5;
    child.tail_node = node;
    child.cooldown = p.branch_cooldown;
    child.relocating = z.relocating;
    st.zones.push_back(child);  // invalidates z
    st.branch_events++;
    detail::move_zone(st, st.zones.back(), second);
    st.zones.back().cooldown = p.branch_cooldown;
  }
  st.spanning_complete = detail::all_attractants_colonized(st);
}

/// Global max-based inhibition within each plasmodium (connected component):
/// activity <- min(cap, activity + relative local stimulus - gain * strongest
/// other activity). Zones under the floor die, except the strongest one.
inline void update_dominance(PlasmodiumState& st, const Scene& scene) {
  const EngineParams& p = scene.params;
  const std::size_t n = st.zones.size();
  std::vector<double> stim(n, 0.0), next(n, 0.0);
  std::vector<int> comp(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!st.zones[i].alive) continue;
    comp[i] = st.component(st.zones[i].owner);
    stim[i] = detail::sensed_stimulus(st, p, comp[i], st.zones[i].position);
  }
  std::vector<char> immune(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] < 0) continue;
    double max_stim = 0.0, max_other = 0.0;
    bool strongest = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (comp[j] != comp[i]) continue;
      max_stim = std::max(max_stim, stim[j]);
      if (j == i) continue;
      max_other = std::max(max_other, st.zones[j].activity);
      const double aj = st.zones[j].activity, ai = st.zones[i].activity;
      if (aj > ai || (aj == ai && j < i)) strongest = false;
    }
    const double rel = max_stim > 0.0 ? std::max(0.0, stim[i]) / max_stim : 0.0;
    next[i] = std::clamp(st.zones[i].activity + rel - p.suppression_gain * max_other, 0.0, p.activity_cap);
    immune[i] = strongest;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] < 0) continue;
    ActiveZone& z = st.zones[i];
    z.activity = next[i];
    if (z.activity < p.activity_floor && !immune[i]) detail::kill_zone(st, z);
  }
}

/// Exhausted consumable food: incident tubes collapse and a fresh zone
/// relocates from the food node.
inline void abandon_and_relocate(PlasmodiumState& st, const Scene& scene) {
  for (std::size_t s = 0; s < st.sources.size(); ++s) {
    const auto& src = st.sources[s];
    if (!src.consumable || !src.colonized || !src.depleted() || st.relocated[s]) continue;
    st.relocated[s] = 1;
    const int node = st.source_node[s];
    if (node < 0) continue;
    for (auto& e : st.graph.edges) {
      if (e.a != node && e.b != node) continue;
      e.abandoned = true;
      detail::retag_edge_cells(st, e, Tag::AbandonedTube);
    }
    int heading = 0, owner = -1;
    double activity = 1.0;
    for (auto& z : st.zones) {
      if (z.alive && z.feeding_source == static_cast<int>(s)) {
        heading = (z.heading + 4) % 8;
        owner = z.owner;
        z.alive = false;
        z.feeding_source = -1;
      }
    }
    if (owner < 0) {
      if (st.colonizers[s].empty()) continue;
      owner = st.colonizers[s].front();
    }
    if (static_cast<int>(st.live_zone_count()) >= scene.params.max_zones) continue;
    ActiveZone fresh;
    fresh.id = static_cast<int>(st.zones.size());
    fresh.owner = owner;
    fresh.position = st.graph.nodes[static_cast<std::size_t>(node)].position;
    fresh.heading = heading;
    fresh.activity = activity;
    fresh.tail_node = node;
    fresh.relocating = true;
    st.zones.push_back(fresh);
  }
}

/// Once every attractant is colonized, continuation turns the tube penalty
/// into a bonus on the plasmodium's own live tubes.
inline void continuation_step(PlasmodiumState& st, const Scene& scene) {
  st.continuation_active = scene.params.continuation && st.spanning_complete;
}

inline void engine_tick(PlasmodiumState& st, const Scene& scene) {
  update_fields(st, scene);
  step_wavefront(st, scene);
  step_zones(st, scene);
  branch_zones(st, scene);
  update_dominance(st, scene);
  abandon_and_relocate(st, scene);
  continuation_step(st, scene);
  ++st.tick;
}

inline bool stop_reached(const PlasmodiumState& st, StopCondition stop) {
  switch (stop) {
    case StopCondition::MaxTicks: return false;
    case StopCondition::AllSourcesColonized: return st.spanning_complete;
    case StopCondition::SingleZoneRemaining: return st.live_zone_count() <= 1;
    case StopCondition::Connected: return st.component_count() == 1;
    case StopCondition::WavesSettled:
      return std::none_of(st.occupancy.data().begin(), st.occupancy.data().end(),
                          [](const CellState& c) { return c.tag == Tag::Front; });
  }
  return false;
}

inline TickSummary summarize(const PlasmodiumState& st) {
  return {st.tick, static_cast<int>(st.live_zone_count()), static_cast<int>(st.occupied_count()),
          static_cast<int>(st.colonized_count())};
}

/// Runs ticks until the stop condition holds or max_ticks have elapsed.
inline RunResult run_until(PlasmodiumState state, const Scene& scene, StopCondition stop, int max_ticks) {
  if (max_ticks < 1) throw std::invalid_argument("run_until: max_ticks must be >= 1");
  RunResult r;
  r.state = std::move(state);
  for (int i = 0; i < max_ticks; ++i) {
    engine_tick(r.state, scene);
    r.trace.push_back(summarize(r.state));
    if (stop_reached(r.state, stop)) {
      r.complete = true;
      break;
    }
  }
  if (stop == StopCondition::MaxTicks) r.complete = true;
  return r;
}

/// Consistency-checked canonical copy of the tube graph. Edges still being
/// extended are closed with Tip nodes in the copy.
inline TubeGraph extract_graph(const PlasmodiumState& st) {
  TubeGraph g = st.graph;
  for (auto& e : g.edges) {
    if (e.a < 0 || e.a >= static_cast<int>(g.nodes.size())) throw InvariantViolation("edge with dangling start node");
    if (!e.open()) continue;
    const int tip = g.add_node(e.polyline.back(), NodeKind::Tip);
    e.b = tip;
  }
  // Edges that never grew beyond their start cell are dropped.
  std::vector<TubeEdge> kept;
  for (auto& e : g.edges)
    if (e.polyline.size() >= 2) kept.push_back(std::move(e));
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<int>(i);
  g.edges = std::move(kept);
  check_tube_graph(g);
  TubeGraph canon = canonicalize(std::move(g));
  check_tube_graph(canon);
  return canon;
}

}  // namespace physarum
