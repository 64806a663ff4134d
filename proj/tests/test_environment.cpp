#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "physarum/environment.hpp"

using namespace physarum;

namespace {

ChemicalField impulse(int w, int h, Cell c, double v = 1.0) {
  ChemicalField f({w, h, 1.0}, Species::Attractant);
  f.concentration[c] = v;
  return f;
}

ChemicalField run(ChemicalField f, const SubstrateMap& sub, double D, double lambda, int steps) {
  for (int i = 0; i < steps; ++i) f = diffuse_step(f, sub, D, lambda);
  return f;
}

}  // namespace

TEST(Diffusion, ZeroIsFixedPoint) {
  const SubstrateMap sub({16, 16, 1.0});
  const ChemicalField z({16, 16, 1.0}, Species::Attractant);
  EXPECT_EQ(diffuse_step(z, sub, 0.2, 0.01), z);
}

TEST(Diffusion, ConservesMassWithoutDecay) {
  SubstrateMap sub({20, 20, 1.0});
  ChemicalField f({20, 20, 1.0}, Species::Attractant);
  f.concentration[(Cell{0, 0})] = 3.0;
  f.concentration[(Cell{10, 7})] = 1.5;
  f.concentration[(Cell{19, 19})] = 0.25;
  const double before = f.total();
  f = run(f, sub, 0.25, 0.0, 200);
  EXPECT_NEAR(f.total(), before, 1e-9 * before);
}

TEST(Diffusion, DecayScalesTotalExactly) {
  // interior fluxes cancel pairwise, so the sum only feels the (1 - lambda) factor
  SubstrateMap sub({16, 16, 1.0});
  ChemicalField f = impulse(16, 16, {8, 8});
  double expected = 1.0;
  for (int i = 0; i < 30; ++i) {
    const double prev = f.total();
    f = diffuse_step(f, sub, 0.2, 0.05);
    expected *= 0.95;
    EXPECT_LT(f.total(), prev);
  }
  EXPECT_NEAR(f.total(), expected, 1e-12);
}

TEST(Diffusion, ImpulseKeepsDihedralSymmetry) {
  const int n = 21, c = 10;
  SubstrateMap sub({n, n, 1.0});
  const ChemicalField f = run(impulse(n, n, {c, c}), sub, 0.2, 0.0, 10);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double v = f[{x, y}];
      const int dx = x - c, dy = y - c;
      for (Cell m : {Cell{c - dx, c + dy}, Cell{c + dx, c - dy}, Cell{c + dy, c + dx}, Cell{c - dy, c - dx}})
        EXPECT_NEAR(f[m], v, 1e-9);
    }
}

TEST(Diffusion, VarianceGrowsByTwoDPerStep) {
  // On an unbounded lattice the explicit stencil is a random walk with step
  // variance 2D per axis; the grid is large enough that the edge is never felt.
  const int n = 81, c = 40, steps = 25;
  const double D = 0.2;
  SubstrateMap sub({n, n, 1.0});
  const ChemicalField f = run(impulse(n, n, {c, c}), sub, D, 0.0, steps);
  double m0 = 0, vx = 0, vy = 0, cov = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double v = f[{x, y}];
      m0 += v;
      vx += v * (x - c) * (x - c);
      vy += v * (y - c) * (y - c);
      cov += v * (x - c) * (y - c);
    }
  EXPECT_NEAR(m0, 1.0, 1e-12);
  EXPECT_NEAR(vx, 2.0 * D * steps, 1e-9);
  EXPECT_NEAR(vy, 2.0 * D * steps, 1e-9);
  EXPECT_NEAR(cov, 0.0, 1e-12);
}

TEST(Diffusion, WallColumnIsOpaque) {
  const int n = 16;
  SubstrateMap sub({n, n, 1.0});
  for (int y = 0; y < n; ++y) sub.set_wall({8, y});
  ChemicalField f = impulse(n, n, {4, 8}, 100.0);
  for (int t = 0; t < 300; ++t) {
    f = diffuse_step(f, sub, 0.25, 0.0);
    for (int y = 0; y < n; ++y) {
      EXPECT_EQ(f[(Cell{8, y})], 0.0);
      for (int x = 9; x < n; ++x) ASSERT_EQ(f[(Cell{x, y})], 0.0);
    }
  }
  EXPECT_NEAR(f.total(), 100.0, 1e-9);
}

TEST(Diffusion, StaysNonNegative) {
  SubstrateMap sub({12, 12, 1.0});
  sub.set_wall({3, 3});
  ChemicalField f = impulse(12, 12, {0, 0}, 5.0);
  std::vector<StimulusSource> src{{{6, 6}, Species::Attractant, 2.0}};
  for (int t = 0; t < 100; ++t) {
    deposit_sources(f, src);
    f = diffuse_step(f, sub, 0.25, 0.3);
    for (double v : f.concentration.data()) ASSERT_GE(v, 0.0);
  }
}

TEST(Diffusion, RejectsBadParameters) {
  SubstrateMap sub({8, 8, 1.0});
  ChemicalField f({8, 8, 1.0}, Species::Attractant);
  EXPECT_THROW(diffuse_step(f, sub, 0.3, 0.0), std::invalid_argument);
  EXPECT_THROW(diffuse_step(f, sub, 0.2, 1.5), std::invalid_argument);
  ChemicalField g({9, 8, 1.0}, Species::Attractant);
  EXPECT_THROW(diffuse_step(g, sub, 0.2, 0.0), std::invalid_argument);
}

TEST(Deposit, SingleSource) {
  ChemicalField f({8, 8, 1.0}, Species::Attractant);
  std::vector<StimulusSource> s{{{2, 3}, Species::Attractant, 1.0}};
  deposit_sources(f, s);
  EXPECT_EQ(f[(Cell{2, 3})], 1.0);
  EXPECT_EQ(f.total(), 1.0);
}

TEST(Deposit, ClampsAtRemainingMass) {
  ChemicalField f({8, 8, 1.0}, Species::Attractant);
  StimulusSource s{{1, 1}, Species::Attractant, 1.0, true, 0.4};
  EXPECT_DOUBLE_EQ(deposit_source(f, s), 0.4);
  EXPECT_EQ(s.remaining_mass, 0.0);
  EXPECT_TRUE(s.depleted());
  EXPECT_EQ(deposit_source(f, s), 0.0);
  EXPECT_DOUBLE_EQ(f[(Cell{1, 1})], 0.4);
}

TEST(Deposit, CoincidentSourcesAdd) {
  ChemicalField f({8, 8, 1.0}, Species::Attractant);
  std::vector<StimulusSource> s{{{4, 4}, Species::Attractant, 0.5}, {{4, 4}, Species::Attractant, 0.5}};
  deposit_sources(f, s);
  EXPECT_DOUBLE_EQ(f[(Cell{4, 4})], 1.0);
}

TEST(Deposit, ColonizedSourceDepletesFaster) {
  ChemicalField f({8, 8, 1.0}, Species::Attractant);
  StimulusSource s{{1, 1}, Species::Attractant, 1.0, true, 100.0, true};
  deposit_source(f, s, 10.0);
  EXPECT_DOUBLE_EQ(s.remaining_mass, 90.0);
  EXPECT_DOUBLE_EQ(f[(Cell{1, 1})], 1.0);
}

TEST(Deposit, IgnoresOtherSpecies) {
  ChemicalField f({8, 8, 1.0}, Species::Repellent);
  std::vector<StimulusSource> s{{{4, 4}, Species::Attractant, 1.0}};
  deposit_sources(f, s);
  EXPECT_EQ(f.total(), 0.0);
}

TEST(Stimulus, LinearCombination) {
  ChemicalField a({8, 8, 1.0}, Species::Attractant), r({8, 8, 1.0}, Species::Repellent);
  EXPECT_EQ(stimulus_at(a, r, {}, {3, 3}), 0.0);
  a.concentration[(Cell{3, 3})] = 2.0;
  r.concentration[(Cell{3, 3})] = 0.5;
  EXPECT_DOUBLE_EQ(stimulus_at(a, r, {1.0, 1.0}, {3, 3}), 1.5);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_LE(stimulus_at(a, r, {0.0, 2.0}, {x, y}), 0.0);
  EXPECT_THROW(stimulus_at(a, r, {}, {8, 0}), std::out_of_range);
}
