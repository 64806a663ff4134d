#include <cmath>

#include <gtest/gtest.h>

#include "physarum/engine.hpp"
#include "physarum/scenes.hpp"

using namespace physarum;

namespace {

// Structural invariants that must hold after every tick.
void check_state(const PlasmodiumState& st, const Scene& scene) {
  ASSERT_NO_THROW(extract_graph(st));
  for (const auto& e : st.graph.edges) {
    for (Cell c : e.polyline) {
      const CellState cs = st.occupancy[c];
      ASSERT_TRUE(cs.tag == Tag::Tube || cs.tag == Tag::AbandonedTube) << c.x << "," << c.y;
    }
  }
  for (int y = 0; y < scene.grid.height; ++y)
    for (int x = 0; x < scene.grid.width; ++x)
      if (scene.substrate.is_wall({x, y})) ASSERT_FALSE(st.occupancy[(Cell{x, y})].plasmodium());
  for (const auto& f : st.fields.per_source)
    for (double v : f.concentration.data()) ASSERT_GE(v, 0.0);
  ASSERT_LE(static_cast<int>(st.live_zone_count()), scene.params.max_zones);
  for (const auto& z : st.zones)
    if (z.alive) ASSERT_TRUE(st.occupancy[z.position].plasmodium());
}

// Channel running north into a closed east-west corridor with a bait at each end.
Scene fork_scene() {
  Scene s = scenes::blank(64, 48, 0.0);
  for (int x = 6; x <= 58; ++x) {
    s.substrate.set_wall({x, 19});
    if (x != 32) s.substrate.set_wall({x, 21});
  }
  s.substrate.set_wall({6, 20});
  s.substrate.set_wall({58, 20});
  for (int y = 22; y < 48; ++y) {
    s.substrate.set_wall({31, y});
    s.substrate.set_wall({33, y});
  }
  s.inoculation_sites = {{32, 44}};
  s.sources = {scenes::attractant({8, 20}), scenes::attractant({56, 20})};
  s.params.seed = 2;
  return s;
}

Scene corridor_scene(double mass) {
  Scene s = scenes::blank(64, 24, 0.0);
  s.inoculation_sites = {{6, 12}};
  StimulusSource food = scenes::attractant({30, 12});
  food.consumable = true;
  food.remaining_mass = mass;
  s.sources = {food};
  s.params.seed = 5;
  return s;
}

}  // namespace

TEST(Init, OneNodeAndZonePerSite) {
  Scene s = scenes::blank(32, 32, 0.0);
  s.inoculation_sites = {{4, 4}, {20, 20}};
  s.sources = {scenes::attractant({4, 12}), scenes::attractant({20, 20})};
  const PlasmodiumState st = init_plasmodium(s);
  ASSERT_EQ(st.graph.nodes.size(), 2u);
  ASSERT_EQ(st.zones.size(), 2u);
  EXPECT_EQ(st.graph.nodes[0].kind, NodeKind::Inoculation);
  EXPECT_EQ(st.occupied_count(), 2u);
  EXPECT_EQ(st.component_count(), 2u);
  // a site sitting on a source colonizes it immediately
  EXPECT_TRUE(st.sources[1].colonized);
  EXPECT_FALSE(st.sources[0].colonized);
  EXPECT_EQ(st.tick, 0);
}

TEST(Wavefront, SingleSiteFillsTheDisc) {
  Scene s = scenes::blank(41, 41, 1.0);
  s.inoculation_sites = {{20, 20}};
  PlasmodiumState st = init_plasmodium(s);
  for (int k = 1; k <= 12; ++k) {
    engine_tick(st, s);
    for (int y = 0; y < 41; ++y)
      for (int x = 0; x < 41; ++x) {
        const bool inside = std::hypot(x - 20, y - 20) <= k + 1e-9;
        ASSERT_EQ(st.occupancy[(Cell{x, y})].plasmodium(), inside) << "tick " << k << " cell " << x << "," << y;
      }
  }
}

TEST(Wavefront, TwoFrontsMeetOnTheBisector) {
  Scene s = scenes::blank(33, 17, 1.0);
  s.inoculation_sites = {{8, 8}, {24, 8}};
  const RunResult r = run_until(init_plasmodium(s), s, StopCondition::WavesSettled, 100);
  ASSERT_TRUE(r.complete);
  for (int y = 0; y < 17; ++y) {
    EXPECT_EQ(r.state.occupancy[(Cell{16, y})].tag, Tag::Blocked);
    for (int x = 0; x < 33; ++x) {
      const CellState cs = r.state.occupancy[(Cell{x, y})];
      if (!cs.plasmodium()) continue;
      EXPECT_EQ(cs.ref, x < 16 ? 0 : 1);
    }
  }
}

TEST(Wavefront, WallsStopTheFront) {
  Scene s = scenes::blank(32, 32, 1.0);
  for (int y = 0; y < 32; ++y) s.substrate.set_wall({16, y});
  s.inoculation_sites = {{4, 16}};
  const RunResult r = run_until(init_plasmodium(s), s, StopCondition::WavesSettled, 200);
  ASSERT_TRUE(r.complete);
  EXPECT_EQ(r.state.occupied_count(), 16u * 32u);
  for (int y = 0; y < 32; ++y) EXPECT_FALSE(r.state.occupancy[(Cell{20, y})].plasmodium());
}

TEST(Engine, InvariantsHoldEveryTick) {
  for (Scene s : {fork_scene(), corridor_scene(40.0)}) {
    PlasmodiumState st = init_plasmodium(s);
    for (int t = 0; t < 250; ++t) {
      engine_tick(st, s);
      check_state(st, s);
      if (HasFatalFailure()) return;
    }
  }
}

TEST(Engine, Deterministic) {
  const Scene s = fork_scene();
  const RunResult a = run_until(init_plasmodium(s), s, StopCondition::MaxTicks, 120);
  const RunResult b = run_until(init_plasmodium(s), s, StopCondition::MaxTicks, 120);
  EXPECT_EQ(a.state, b.state);
  EXPECT_EQ(a.trace, b.trace);
  // splitting a run in two gives the same state
  const RunResult first = run_until(init_plasmodium(s), s, StopCondition::MaxTicks, 50);
  const RunResult rest = run_until(first.state, s, StopCondition::MaxTicks, 70);
  EXPECT_EQ(rest.state, a.state);
}

TEST(Engine, ReachesBothBaitsByForking) {
  const Scene s = fork_scene();
  const RunResult r = run_until(init_plasmodium(s), s, StopCondition::AllSourcesColonized, 400);
  ASSERT_TRUE(r.complete);
  EXPECT_GE(r.state.branch_events, 1);
  const TubeGraph g = extract_graph(r.state);
  EXPECT_GE(g.count_nodes(NodeKind::Branch), 1u);
  EXPECT_TRUE(is_acyclic(g));
}

TEST(Engine, NoSignalMeansNoGrowth) {
  Scene s = scenes::blank(32, 32, 0.0);
  s.inoculation_sites = {{16, 16}};
  const RunResult r = run_until(init_plasmodium(s), s, StopCondition::MaxTicks, 50);
  EXPECT_EQ(r.state.occupied_count(), 1u);
  EXPECT_EQ(r.state.live_zone_count(), 1u);
}

TEST(Engine, ExhaustedFoodAbandonsItsTubes) {
  const Scene s = corridor_scene(40.0);
  PlasmodiumState st = init_plasmodium(s);
  int t = 0;
  for (; t < 600 && !st.relocated[0]; ++t) engine_tick(st, s);
  ASSERT_TRUE(st.relocated[0]) << "food never ran out";
  ASSERT_TRUE(st.sources[0].colonized);
  const int node = st.source_node[0];
  ASSERT_GE(node, 0);
  int incident = 0;
  for (const auto& e : st.graph.edges)
    if (e.a == node || e.b == node) {
      ++incident;
      EXPECT_TRUE(e.abandoned);
      for (Cell c : e.polyline)
        if (st.node_at[c] < 0) EXPECT_EQ(st.occupancy[c].tag, Tag::AbandonedTube);  // node cells are shared
    }
  EXPECT_GE(incident, 1);
  EXPECT_TRUE(std::any_of(st.zones.begin(), st.zones.end(), [](const ActiveZone& z) { return z.alive && z.relocating; }));
}

TEST(Engine, ContinuationOnlyWhenEnabledAndComplete) {
  Scene s = corridor_scene(1e9);
  s.params.continuation = false;
  RunResult off = run_until(init_plasmodium(s), s, StopCondition::AllSourcesColonized, 400);
  ASSERT_TRUE(off.complete);
  engine_tick(off.state, s);
  EXPECT_FALSE(off.state.continuation_active);
  s.params.continuation = true;
  PlasmodiumState on = init_plasmodium(s);
  engine_tick(on, s);
  EXPECT_FALSE(on.continuation_active);
  RunResult done = run_until(on, s, StopCondition::AllSourcesColonized, 400);
  engine_tick(done.state, s);
  EXPECT_TRUE(done.state.continuation_active);
}

TEST(RunUntil, StopConditionsAndLimits) {
  const Scene s = fork_scene();
  EXPECT_THROW(run_until(init_plasmodium(s), s, StopCondition::MaxTicks, 0), std::invalid_argument);
  const RunResult r = run_until(init_plasmodium(s), s, StopCondition::MaxTicks, 7);
  EXPECT_TRUE(r.complete);
  ASSERT_EQ(r.trace.size(), 7u);
  EXPECT_EQ(r.trace.back().tick, 7);
  const RunResult cut = run_until(init_plasmodium(s), s, StopCondition::AllSourcesColonized, 3);
  EXPECT_FALSE(cut.complete);
  Scene lone = scenes::blank(16, 16, 0.0);
  lone.inoculation_sites = {{8, 8}};
  EXPECT_TRUE(run_until(init_plasmodium(lone), lone, StopCondition::SingleZoneRemaining, 5).complete);
  EXPECT_TRUE(run_until(init_plasmodium(lone), lone, StopCondition::Connected, 5).complete);
}
