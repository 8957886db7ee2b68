#include <gtest/gtest.h>

#include <cmath>

#include "dampc/smc.hpp"
#include "support/oracles.hpp"

namespace dampc {
namespace {

ExperimentConfig quick_experiment() {
  ExperimentConfig x;
  x.birds = 4;
  x.controller.beta = 10;
  x.controller.swarm.iterations = 10;
  x.controller.m = 8;
  x.post_goal_steps = 2;
  return x;
}

TEST(RequiredRuns, Examples) {
  EXPECT_EQ(required_runs(0.01, 0.05), 1476u);
  EXPECT_EQ(required_runs(0.01, 0.05, SampleSizeMode::chernoff), 147556u);
  EXPECT_EQ(required_runs(0.5, 2.0), 0u);
}

TEST(Parsing, NamesRoundTrip) {
  for (auto k : {ControllerKind::dampc, ControllerKind::ampc}) EXPECT_EQ(parse_controller_kind(to_string(k)), k);
  EXPECT_EQ(parse_controller_kind("AMPC"), ControllerKind::ampc);
  EXPECT_THROW(parse_controller_kind("mpc"), std::invalid_argument);
  for (auto m : {SampleSizeMode::literal, SampleSizeMode::chernoff})
    EXPECT_EQ(parse_sample_size_mode(to_string(m)), m);
  for (auto d : {DisturbanceSpec::Kind::displacement, DisturbanceSpec::Kind::crash})
    EXPECT_EQ(parse_disturbance_kind(to_string(d)), d);
}

TEST(Disturbance, ZeroMagnitudeLeavesStateUnchanged) {
  Rng init(1), rng(2);
  const FlockState s = sample_initial(init, 5, InitBox{});
  DisturbanceSpec spec;
  spec.magnitude = 0.0;
  EXPECT_EQ(apply_disturbance(s, spec, rng), s);
  spec.kind = DisturbanceSpec::Kind::crash;
  EXPECT_EQ(apply_disturbance(s, spec, rng), s);
}

TEST(Disturbance, DirectedDisplacementMovesOneBird) {
  Rng init(1), rng(2);
  const FlockState s = sample_initial(init, 5, InitBox{});
  DisturbanceSpec spec;
  spec.target = 0;
  spec.direction = Vec2{3.0, 0.0};
  const FlockState d = apply_disturbance(s, spec, rng);
  EXPECT_EQ(d.birds[0].position, (s.birds[0].position + Vec2{1, 0}));
  EXPECT_EQ(d.birds[0].velocity, s.birds[0].velocity);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(d.birds[i], s.birds[i]);
}

TEST(Disturbance, RandomDisplacementHasRequestedMagnitude) {
  Rng init(1);
  const FlockState s = sample_initial(init, 5, InitBox{});
  DisturbanceSpec spec;
  spec.magnitude = 0.7;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const FlockState d = apply_disturbance(s, spec, rng);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      if (d.birds[i] == s.birds[i]) continue;
      ++moved;
      EXPECT_NEAR(norm(d.birds[i].position - s.birds[i].position), 0.7, 1e-12);
    }
    EXPECT_EQ(moved, 1u);
    Rng again(seed);
    EXPECT_EQ(apply_disturbance(s, spec, again), d);
  }
}

TEST(Disturbance, CrashStopsTheBird) {
  Rng init(1), rng(2);
  const FlockState s = sample_initial(init, 3, InitBox{});
  DisturbanceSpec spec;
  spec.kind = DisturbanceSpec::Kind::crash;
  spec.target = 2;
  const FlockState d = apply_disturbance(s, spec, rng);
  EXPECT_EQ(d.birds[2].velocity, (Vec2{0, 0}));
  EXPECT_EQ(d.birds[2].position, s.birds[2].position);
  EXPECT_EQ(clamp_action(d.birds[2].velocity, {1, 1}, ActionLimits{}), (Vec2{0, 0}));
  spec.target = 3;
  EXPECT_THROW(apply_disturbance(s, spec, rng), std::out_of_range);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig x;
  EXPECT_EQ(x.run_count(), 1476u);
  x.runs = 12;
  EXPECT_EQ(x.run_count(), 12u);
  x.epsilon = 1.0;
  EXPECT_THROW(x.validate(), std::invalid_argument);
  x.epsilon = 0.1;
  x.delta = 0.0;
  EXPECT_THROW(x.validate(), std::invalid_argument);
}

TEST(Estimate, SingleRunAggregateEqualsTheRun) {
  ExperimentConfig x = quick_experiment();
  x.runs = 1;
  const Estimate e = estimate(x);
  ASSERT_EQ(e.records.size(), 1u);
  const RunRecord& r = e.records[0];
  EXPECT_EQ(e.mu, r.success ? 1.0 : 0.0);
  if (r.success) {
    EXPECT_EQ(e.stats.avg_convergence_steps, static_cast<double>(r.steps));
    EXPECT_EQ(e.stats.avg_k_until_convergence, r.avg_k_until);
    EXPECT_TRUE(std::isnan(e.stats.avg_k_bad_runs));
  } else {
    EXPECT_EQ(e.stats.avg_k_bad_runs, r.avg_k_until);
  }
}

TEST(Estimate, AmpcNeighborhoodIsAlwaysTheFlock) {
  ExperimentConfig x = quick_experiment();
  x.kind = ControllerKind::ampc;
  x.runs = 4;
  const Estimate e = estimate(x);
  for (const RunRecord& r : e.records) {
    if (r.steps > 0) {
      EXPECT_EQ(r.avg_k_until, 4.0);
      EXPECT_EQ(r.avg_k_over_m, 4.0);
    }
    if (r.avg_k_after) EXPECT_EQ(*r.avg_k_after, 4.0);
  }
  if (e.stats.successes > 0) EXPECT_EQ(e.stats.avg_k_until_convergence, 4.0);
}

TEST(Estimate, RecordsAreReproducibleAndThreadIndependent) {
  ExperimentConfig x = quick_experiment();
  x.runs = 3;
  x.keep_traces = true;
  const Estimate a = estimate(x);
  x.threads = 3;
  const Estimate b = estimate(x);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].seed, x.base_seed + i);
    EXPECT_EQ(*a.records[i].result, *b.records[i].result);
    EXPECT_EQ(a.records[i].success, b.records[i].success);
    // Single execution with the same index reproduces the record.
    ExperimentConfig one = x;
    one.threads = 1;
    EXPECT_EQ(*execute_run(one, i).result, *a.records[i].result);
  }
  EXPECT_EQ(a.mu, b.mu);
}

TEST(Aggregate, PartitionsGoodAndBadRuns) {
  std::vector<RunRecord> recs(4);
  recs[0].success = true;
  recs[0].steps = 4;
  recs[0].avg_k_until = 3.5;
  recs[0].avg_k_over_m = 3.0;
  recs[0].avg_horizon = 1.0;
  recs[0].avg_k_after = 3.0;
  recs[1].success = true;
  recs[1].steps = 6;
  recs[1].avg_k_until = 4.5;
  recs[1].avg_k_over_m = 4.0;
  recs[1].avg_horizon = 2.0;
  recs[1].avg_k_after = 5.0;
  recs[2].avg_k_until = 5.0;
  recs[3].avg_k_until = 4.0;
  recs[3].recovered = true;
  const RunStatistics s = aggregate(recs);
  EXPECT_EQ(s.runs, 4u);
  EXPECT_EQ(s.successes, 2u);
  EXPECT_EQ(s.success_rate, 0.5);
  EXPECT_EQ(s.avg_convergence_steps, 5.0);
  EXPECT_EQ(s.avg_k_until_convergence, 4.0);
  EXPECT_EQ(s.avg_k_over_m, 3.5);
  EXPECT_EQ(s.avg_k_after_convergence, 4.0);
  EXPECT_EQ(s.avg_horizon, 1.5);
  EXPECT_EQ(s.avg_k_bad_runs, 4.5);
  ASSERT_TRUE(s.recovery_rate);
  EXPECT_EQ(*s.recovery_rate, 1.0);
}

TEST(ExecuteRun, OverMPaddingUsesFinalNeighborhood) {
  ExperimentConfig x = quick_experiment();
  x.controller.m = 20;
  x.keep_traces = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const RunRecord r = execute_run(x, i);
    if (!r.success || r.steps == 0) continue;
    double sum = 0.0;
    for (std::size_t t = 1; t <= r.steps; ++t) sum += static_cast<double>(r.result->trace[t].k);
    const double pad = static_cast<double>(20 - r.steps) * static_cast<double>(r.result->trace.back().k_next);
    EXPECT_NEAR(r.avg_k_over_m, (sum + pad) / 20.0, 1e-12);
    EXPECT_NEAR(r.avg_k_until, sum / static_cast<double>(r.steps), 1e-12);
  }
}

TEST(ExecuteRun, PostGoalTrialRunsOnlyAfterSuccess) {
  ExperimentConfig x = quick_experiment();
  x.controller.phi = 1e9;  // goal holds from the start
  x.disturbance = DisturbanceSpec{};
  const RunRecord r = execute_run(x, 0);
  EXPECT_TRUE(r.success);
  ASSERT_TRUE(r.recovered);
  EXPECT_TRUE(*r.recovered);
  EXPECT_EQ(r.recovery_steps, 0u);
  ASSERT_TRUE(r.avg_k_after);
}

TEST(ExecuteRun, ScheduledDisturbanceAltersTheTrace) {
  ExperimentConfig x = quick_experiment();
  x.controller.m = 3;
  x.keep_traces = true;
  const RunRecord clean = execute_run(x, 0);
  DisturbanceSpec d;
  d.schedule = {1};
  d.magnitude = 2.0;
  x.disturbance = d;
  const RunRecord hit = execute_run(x, 0);
  ASSERT_GE(hit.result->trace.size(), 2u);
  EXPECT_EQ(clean.result->trace[0], hit.result->trace[0]);
  if (clean.steps >= 1) EXPECT_NE(clean.result->trace[1].state, hit.result->trace[1].state);
}

}  // namespace
}  // namespace dampc
