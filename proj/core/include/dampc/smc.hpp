#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dampc/controller.hpp"
#include "dampc/flock.hpp"

namespace dampc {

enum class ControllerKind { dampc, ampc };

std::string to_string(ControllerKind kind);
// Accepts "dampc" / "ampc" (case-insensitive); throws std::invalid_argument.
ControllerKind parse_controller_kind(const std::string& name);

std::unique_ptr<Controller> make_controller(ControllerKind kind, const ControllerConfig& cfg, FlockState s0,
                                            std::uint64_t seed);

// literal:  ceil(4 ln(2/delta) / epsilon)
// chernoff: ceil(4 ln(2/delta) / epsilon^2)
enum class SampleSizeMode { literal, chernoff };

std::string to_string(SampleSizeMode mode);
SampleSizeMode parse_sample_size_mode(const std::string& name);

std::size_t required_runs(double epsilon, double delta, SampleSizeMode mode = SampleSizeMode::literal);

struct DisturbanceSpec {
  enum class Kind { displacement, crash };

  Kind kind = Kind::displacement;
  double magnitude = 1.0;
  // Absolute time steps at which the disturbance hits during the main run.
  // Empty: applied once after the goal is reached, followed by a recovery
  // run of at most m steps.
  std::vector<std::size_t> schedule;
  std::optional<std::size_t> target;   // bird index; random when absent
  std::optional<Vec2> direction;       // displacement direction; random when absent

  void validate() const;
};

std::string to_string(DisturbanceSpec::Kind kind);
DisturbanceSpec::Kind parse_disturbance_kind(const std::string& name);

// displacement: moves one bird's position by `magnitude` along `direction`
// (normalized) or a uniformly random direction.
// crash: zeroes one bird's velocity; the acceleration bound rho |v| then
// forces its next acceleration to zero as well.
// A zero magnitude leaves the state unchanged.
FlockState apply_disturbance(const FlockState& state, const DisturbanceSpec& spec, Rng& rng);

struct ExperimentConfig {
  std::size_t birds = 5;
  ControllerConfig controller;
  InitBox init;
  std::optional<std::size_t> runs;     // explicit L; otherwise from (epsilon, delta)
  double epsilon = 0.01;
  double delta = 0.05;
  SampleSizeMode sample_size = SampleSizeMode::literal;
  std::uint64_t base_seed = 1;
  ControllerKind kind = ControllerKind::dampc;
  std::optional<DisturbanceSpec> disturbance;
  std::size_t post_goal_steps = 10;    // window for the "after convergence" average
  unsigned threads = 1;                // runs executed concurrently
  bool keep_traces = false;

  void validate() const;
  std::size_t run_count() const;
};

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool success = false;                // Z_l
  std::size_t steps = 0;               // actions until the goal (or m)
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double avg_horizon = 0.0;
  double avg_k_until = 0.0;            // over the steps of the run
  double avg_k_over_m = 0.0;           // padded to m steps with the final size
  std::optional<double> avg_k_after;   // continued control after the goal
  std::optional<bool> recovered;       // post-goal disturbance outcome
  std::size_t recovery_steps = 0;
  std::size_t max_rounds = 0;
  double wall_seconds = 0.0;
  std::optional<RunResult> result;     // kept when keep_traces is set
};

struct RunStatistics {
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  // Means over successful runs; NaN when there are none.
  double avg_convergence_steps = 0.0;
  double avg_horizon = 0.0;
  double avg_k_until_convergence = 0.0;
  double avg_k_over_m = 0.0;
  double avg_k_after_convergence = 0.0;
  // Mean over failed runs; NaN when there are none.
  double avg_k_bad_runs = 0.0;
  std::optional<double> recovery_rate;
  double wall_seconds_total = 0.0;
  double wall_seconds_mean = 0.0;
};

RunStatistics aggregate(const std::vector<RunRecord>& records);

struct Estimate {
  double mu = 0.0;  // sum Z_l / L
  RunStatistics stats;
  std::vector<RunRecord> records;
};

using RunSink = std::function<void(const RunRecord&)>;

// One execution with seed base_seed + index.
RunRecord execute_run(const ExperimentConfig& cfg, std::size_t index);

// L i.i.d. executions; records are returned in seed order regardless of
// cfg.threads. `sink` is invoked in seed order after all runs finish.
Estimate estimate(const ExperimentConfig& cfg, const RunSink& sink = {});

}  // namespace dampc
