#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dampc/ampc.hpp"
#include "dampc/controller.hpp"

namespace dampc {

struct NeighborhoodPolicy {
  std::size_t k_min = 3;
  std::size_t k_max = 0;
  std::size_t k = 0;

  void validate(std::size_t birds) const;
};

// Adaptive neighborhood resizing:
//   level advanced: min(max(k - ceil(1 - J/k), k_min), k_max)
//   otherwise:      min(k + 1, k_max)
std::size_t neigh_size(double cost, std::size_t k, bool level_advanced, const NeighborhoodPolicy& policy);

struct ConsensusRound {
  std::vector<std::size_t> unfixed;   // R at the start of the round
  std::size_t winner = 0;             // i*, lowest cost_hat, lowest index on ties
  std::vector<std::size_t> subflock;  // N_{i*}
  double winner_cost = 0.0;
};

struct ConsensusOutcome {
  AccelerationPlan plans;                 // flock-wide, every bird fixed
  std::vector<LocalResult> proposals;     // last proposal made by each bird
  std::vector<ConsensusRound> rounds;
};

// Global-consensus loop: while some bird is unfixed, every unfixed bird runs
// local_ampc on its k nearest neighbors (honoring already fixed sequences)
// with delta_i = J(s_Ni)/(m - t); the best proposal's sub-flock is fixed.
// `initial` carries sequences that are already fixed on entry.
ConsensusOutcome consensus_step(const FlockState& state, const AccelerationPlan& initial, std::size_t k,
                                std::size_t level_index, const ControllerConfig& cfg, const CostModel& model,
                                std::uint64_t step_seed);
ConsensusOutcome consensus_step(const FlockState& state, std::size_t k, std::size_t level_index,
                                const ControllerConfig& cfg, const CostModel& model, std::uint64_t step_seed);

// Flock-wide look-ahead state: every fixed sequence simulated to the longest
// fixed horizon, shorter sequences padded with zero acceleration.
FlockState lookahead_state(const FlockState& state, const AccelerationPlan& plans);

// Distributed adaptive-neighborhood, adaptive-horizon MPC. Starts with k = B.
class DampcController final : public Controller {
 public:
  DampcController(ControllerConfig cfg, FlockState s0, std::uint64_t seed);

  const StepRecord& advance() override;

  NeighborhoodPolicy policy() const noexcept { return {config_.k_min, config_.k_max, k_}; }
  // Outcome of the most recent consensus step.
  const ConsensusOutcome& last_consensus() const noexcept { return last_; }

 private:
  ConsensusOutcome last_;
};

RunResult dampc_run(const ControllerConfig& cfg, std::size_t birds, const InitBox& box, std::uint64_t seed,
                    const TraceSink& sink = {});
RunResult dampc_run(const ControllerConfig& cfg, const FlockState& s0, std::uint64_t seed,
                    const TraceSink& sink = {});

}  // namespace dampc
