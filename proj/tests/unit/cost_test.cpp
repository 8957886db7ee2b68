#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dampc/cost.hpp"
#include "support/oracles.hpp"

namespace dampc {
namespace {

using testing::make_flock;
constexpr double kPi = std::numbers::pi;

TEST(RelativeFrame, Examples) {
  const BirdState i{{0, 0}, {0, 1}};
  auto f = relative_frame(i, {{0, 3}, {0, 1}});
  ASSERT_TRUE(f);
  EXPECT_DOUBLE_EQ(f->lateral, 0.0);
  EXPECT_DOUBLE_EQ(f->ahead, 3.0);
  EXPECT_TRUE(f->front);

  f = relative_frame(i, {{2, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(f->lateral, 2.0);
  EXPECT_DOUBLE_EQ(f->ahead, 0.0);
  EXPECT_FALSE(f->front);
  EXPECT_FALSE(f->left);

  EXPECT_TRUE(relative_frame(i, {{-2, 1}, {0, 1}})->left);
  EXPECT_FALSE(relative_frame({{0, 0}, {1, 0}}, {{-1, 0}, {1, 0}})->front);
  EXPECT_FALSE(relative_frame({{0, 0}, {0, 0}}, {{1, 1}, {1, 0}}));
}

TEST(BlockedInterval, DirectlyAheadBlocksWholeCone) {
  const WingConfig cfg{0.5, kPi / 4};
  const auto iv = blocked_interval(BirdState{{0, 0}, {0, 1}}, BirdState{{0, 1}, {0, 1}}, cfg);
  ASSERT_TRUE(iv);
  EXPECT_NEAR(iv->lo, 3 * kPi / 8, 1e-15);
  EXPECT_NEAR(iv->hi, 5 * kPi / 8, 1e-15);
  EXPECT_NEAR(clear_view(make_flock({{{0, 0}, {0, 1}}, {{0, 1}, {0, 1}}}).birds, cfg), 1.0, 1e-15);
}

TEST(BlockedInterval, BehindOrFarAsideIsClear) {
  const WingConfig cfg;
  const BirdState i{{0, 0}, {0, 1}};
  EXPECT_FALSE(blocked_interval(i, {{0, -1}, {0, 1}}, cfg));
  EXPECT_FALSE(blocked_interval(i, {{5, 1}, {0, 1}}, cfg));
  EXPECT_FALSE(blocked_interval(i, {{-5, 1}, {0, 1}}, cfg));
}

TEST(BlockedInterval, LeftSideIsMirrorImage) {
  const WingConfig cfg;
  const BirdState i{{0, 0}, {0, 1}};
  const auto r = blocked_interval(i, {{1.3, 2}, {0, 1}}, cfg);
  const auto l = blocked_interval(i, {{-1.3, 2}, {0, 1}}, cfg);
  ASSERT_TRUE(r && l);
  EXPECT_NEAR(l->lo, kPi - r->hi, 1e-15);
  EXPECT_NEAR(l->hi, kPi - r->lo, 1e-15);
}

TEST(UnionMeasure, SimpleCases) {
  std::vector<AngularInterval> none;
  EXPECT_EQ(union_measure(none), 0.0);
  std::vector<AngularInterval> v{{0.0, 1.0}, {0.5, 2.0}, {3.0, 3.5}, {3.5, 3.75}};
  EXPECT_DOUBLE_EQ(union_measure(v), 2.75);
}

TEST(UnionMeasure, AgreesWithGridOracle) {
  Rng rng(8);
  constexpr std::size_t grid = 200000;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 8;
    std::vector<AngularInterval> v;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = uniform01(rng);
      v.push_back({a, a + 0.3 * uniform01(rng)});
    }
    std::size_t hits = 0;
    for (std::size_t g = 0; g < grid; ++g) {
      const double x = 1.3 * (static_cast<double>(g) + 0.5) / grid;
      for (const AngularInterval& iv : v)
        if (iv.lo <= x && x <= iv.hi) {
          ++hits;
          break;
        }
    }
    const double oracle = 1.3 * static_cast<double>(hits) / grid;
    ASSERT_NEAR(union_measure(v), oracle, 2.0 * static_cast<double>(n) * 1.3 / grid);
  }
}

TEST(ClearView, AgreesWithRayCasting) {
  Rng rng(21);
  const WingConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const auto birds = testing::random_flock(rng, 3 + trial % 3, 3.0, 0.6);
    const double oracle = testing::ray_cast_clear_view(birds, cfg.w, cfg.theta, 100000);
    ASSERT_NEAR(clear_view(birds, cfg), oracle, 2e-3) << "trial " << trial;
  }
}

TEST(ClearView, BoundedByFlockSize) {
  Rng rng(4);
  const WingConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const auto birds = testing::random_flock(rng, 6, 2.0, 3.14);
    const double cv = clear_view(birds, cfg);
    ASSERT_GE(cv, 0.0);
    ASSERT_LE(cv, static_cast<double>(birds.size()) + 1e-12);
  }
}

TEST(VelocityMatching, Examples) {
  EXPECT_NEAR(velocity_matching(make_flock({{{0, 0}, {1, 0}}, {{3, 3}, {0, 1}}}).birds), 0.5, 1e-12);
  EXPECT_EQ(velocity_matching(make_flock({{{0, 0}, {1, 1}}, {{3, 3}, {1, 1}}, {{1, 0}, {1, 1}}}).birds), 0.0);
  EXPECT_EQ(velocity_matching(make_flock({{{0, 0}, {0, 0}}, {{1, 0}, {0, 0}}}).birds), 0.0);
}

TEST(VelocityMatching, RotationInvariant) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto birds = testing::random_flock(rng, 5, 3.0, 3.14);
    const double before = velocity_matching(birds);
    const double angle = uniform(rng, 0, 2 * kPi);
    for (BirdState& b : birds) b.velocity = rotated(b.velocity, angle);
    ASSERT_NEAR(velocity_matching(birds), before, 1e-12);
  }
}

TEST(Upwash, FollowerAtPeakMatchesScalarFormula) {
  const double w = 1.0;
  const WingConfig cfg{w, kPi / 4};
  const UpwashParams up = UpwashParams::defaults(w);
  const double h = (12 + kPi) * w / 16;
  // Follower at the origin heading +y, leader ahead on its right.
  const auto birds = make_flock({{{0, 0}, {0, 1}}, {{h, 1}, {0, 1}}}).birds;
  const double s = std::erf(2 * std::sqrt(2.0) * (h - (4 - kPi) * w / 8));
  const auto um = upwash_per_bird(birds, cfg, up);
  EXPECT_NEAR(um[0], std::min(s, 1.0), 1e-15);
  EXPECT_EQ(um[1], 0.0);
  EXPECT_NEAR(upwash_benefit(birds, cfg, up), 1.0 + (1.0 - s), 1e-15);
}

TEST(Upwash, DownwashBranchBehindLeader) {
  const WingConfig cfg;
  const UpwashParams up = UpwashParams::defaults(cfg.w);
  // Directly behind: h = 0 < split, S(0) < 0, G centred at the origin.
  const auto birds = make_flock({{{0, 0}, {0, 1}}, {{0, 0.5}, {0, 1}}}).birds;
  const double s = std::erf(2 * std::sqrt(2.0) * (0 - (4 - kPi) / 8));
  const double g = std::exp(-0.5 * 0.25);
  ASSERT_LT(s * g, 0.0);
  EXPECT_EQ(upwash_per_bird(birds, cfg, up)[0], 0.0);  // floored
}

TEST(Upwash, PerBirdStaysInUnitInterval) {
  Rng rng(12);
  const WingConfig cfg;
  const UpwashParams up = UpwashParams::defaults(cfg.w);
  for (int trial = 0; trial < 300; ++trial) {
    const auto birds = testing::random_flock(rng, 7, 2.5, 3.14);
    for (double um : upwash_per_bird(birds, cfg, up)) {
      ASSERT_GE(um, 0.0);
      ASSERT_LE(um, 1.0);
    }
  }
}

TEST(TotalCost, SingleBirdIsExactlyZero) {
  const CostModel model;
  const CostBreakdown c = model.evaluate(make_flock({{{1, 2}, {0.3, 0.4}}}));
  EXPECT_EQ(c.cv, 0.0);
  EXPECT_EQ(c.vm, 0.0);
  EXPECT_EQ(c.ub, 1.0);
  EXPECT_EQ(c.total, 0.0);
}

TEST(TotalCost, ModelMatchesComponentFunctions) {
  Rng rng(13);
  const CostParams p;
  const CostModel model(p);
  for (int trial = 0; trial < 300; ++trial) {
    const auto birds = testing::random_flock(rng, 1 + trial % 7, 3.0, trial % 2 ? 0.5 : 3.14);
    const CostBreakdown c = model.evaluate(birds);
    const double cv = clear_view(birds, p.wing);
    const double vm = velocity_matching(birds);
    const double ub = upwash_benefit(birds, p.wing, p.upwash);
    ASSERT_NEAR(c.cv, cv, 1e-12);
    ASSERT_NEAR(c.vm, vm, 1e-12);
    ASSERT_NEAR(c.ub, ub, 1e-12);
    ASSERT_NEAR(c.total, cv * cv + vm * vm + (ub - 1) * (ub - 1), 1e-10);
    ASSERT_GE(c.total, 0.0);
  }
}

TEST(TotalCost, InvariantUnderTranslationAndRotation) {
  Rng rng(14);
  const CostModel model;
  for (int trial = 0; trial < 200; ++trial) {
    auto birds = testing::random_flock(rng, 5, 3.0, 1.0);
    const double before = model.total(birds);
    const Vec2 shift{uniform(rng, -10, 10), uniform(rng, -10, 10)};
    const double angle = uniform(rng, 0, 2 * kPi);
    for (BirdState& b : birds) {
      b.position = rotated(b.position + shift, angle);
      b.velocity = rotated(b.velocity, angle);
    }
    ASSERT_NEAR(model.total(birds), before, 1e-9 * (1 + before));
  }
}

TEST(CostParams, Validation) {
  EXPECT_THROW((WingConfig{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((WingConfig{1.0, kPi}.validate()), std::invalid_argument);
  UpwashParams up = UpwashParams::defaults(1.0);
  up.sigma1 = Sym2{1.0, 2.0, 1.0};
  EXPECT_THROW(up.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace dampc
