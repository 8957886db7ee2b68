#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "dampc/cost.hpp"
#include "dampc/flock.hpp"
#include "dampc/pso.hpp"

namespace dampc {

// Parameters shared by the centralized and the distributed controller.
struct ControllerConfig {
  double phi = 0.1;           // goal: J(s) <= phi
  std::size_t h_max = 3;
  std::size_t m = 60;         // step budget
  double beta = 100.0;        // particles p = 2 beta h B
  SwarmConfig swarm;          // particles and seed are set per call
  ActionLimits limits;
  CostParams cost;
  std::size_t k_min = 3;
  std::size_t k_max = 0;      // 0 means B
  unsigned threads = 1;       // fan-out of the per-bird local controllers

  void validate() const;
};

// Lyapunov bookkeeping: the strictly decreasing sequence of look-ahead costs
// l_0 > l_1 > ... and the threshold that was in force when each was set.
class LevelLedger {
 public:
  LevelLedger() = default;
  LevelLedger(double initial_cost, double phi, std::size_t m);

  // Index t of the level being sought; l_{t-1} is the current level.
  std::size_t index() const noexcept { return levels_.size(); }
  double current() const noexcept { return levels_.back(); }
  // (l_0 - phi)/m while seeking l_1, then l_{t-1}/(m - t + 1).
  double threshold() const;
  // Records `candidate` as the next level if current() - candidate > threshold().
  bool try_advance(double candidate);

  const std::vector<double>& levels() const noexcept { return levels_; }
  // thresholds()[i] was in force when levels()[i + 1] was recorded.
  const std::vector<double>& thresholds() const noexcept { return deltas_; }

  friend bool operator==(const LevelLedger&, const LevelLedger&) = default;

 private:
  std::vector<double> levels_;
  std::vector<double> deltas_;
  double phi_ = 0.0;
  std::size_t m_ = 1;
};

// One row of a run's trace. Row t holds the state after t actions; row 0 is
// the initial state.
struct StepRecord {
  std::size_t t = 0;
  FlockState state;
  CostBreakdown cost;
  std::size_t level_index = 0;   // levels advanced so far
  double level = 0.0;            // current level value
  double lookahead_cost = 0.0;   // J at the end of the committed plan
  bool level_advanced = false;
  std::size_t k = 0;             // neighborhood size used for this step
  std::size_t k_next = 0;        // size chosen for the following step
  std::vector<std::size_t> horizons;          // committed plan length per bird
  std::size_t rounds = 0;                     // consensus rounds
  std::vector<std::size_t> unfixed_per_round; // |R| at the start of each round

  std::size_t max_horizon() const noexcept;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunResult {
  FlockState s0;
  std::vector<ActionVector> actions;
  std::vector<StepRecord> trace;
  LevelLedger ledger;
  bool success = false;
  std::size_t steps = 0;  // actions applied

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

using TraceSink = std::function<void(const StepRecord&)>;

// Step-wise closed-loop controller. advance() applies exactly one action.
class Controller {
 public:
  virtual ~Controller() = default;

  virtual const StepRecord& advance() = 0;

  const FlockState& state() const noexcept { return state_; }
  double cost() const noexcept { return trace_.back().cost.total; }
  bool at_goal() const noexcept { return cost() <= config_.phi; }
  const LevelLedger& ledger() const noexcept { return ledger_; }
  const std::vector<StepRecord>& trace() const noexcept { return trace_; }
  const std::vector<ActionVector>& actions() const noexcept { return actions_; }
  const ControllerConfig& config() const noexcept { return config_; }
  const CostModel& model() const noexcept { return model_; }
  std::size_t neighborhood() const noexcept { return k_; }

  // Replaces the current state (disturbance injection) and records it as a
  // new trace row without advancing levels.
  void disturb(FlockState perturbed);

  RunResult result() const;

 protected:
  Controller(ControllerConfig cfg, FlockState s0, std::uint64_t seed, std::size_t k0);

  // Appends a trace row for the current state.
  StepRecord& record(std::size_t k_used, double lookahead, bool advanced);

  ControllerConfig config_;
  CostModel model_;
  std::uint64_t seed_;
  FlockState state_;
  FlockState s0_;
  LevelLedger ledger_;
  std::size_t k_;
  std::vector<StepRecord> trace_;
  std::vector<ActionVector> actions_;
};

// Runs `ctrl` until the goal is reached or `budget` actions were applied.
RunResult run_to_goal(Controller& ctrl, std::size_t budget, const TraceSink& sink = {});

}  // namespace dampc
