#pragma once

#include <cstddef>
#include <cstdint>

#include "dampc/controller.hpp"
#include "dampc/pso.hpp"

namespace dampc {

// l_{i-1} / (m - i + 1) for 1 <= i <= m. Throws std::out_of_range otherwise.
double dynamic_threshold(double prev_level, std::size_t i, std::size_t m);
// (l_0 - phi) / m.
double initial_threshold(double initial_level, double phi, std::size_t m);

struct LocalAmpcConfig {
  std::size_t h_max = 3;
  double beta = 100.0;
  SwarmConfig swarm;   // `particles` and `seed` are overridden per horizon
  ActionLimits limits;
};

struct LocalResult {
  FlockState s_hat;      // after the last action of `plan`
  FlockState s_tilde;    // after the first action of `plan`
  AccelerationPlan plan; // concrete, horizon_used entries per bird
  double cost_hat = 0.0; // horizon cost achieved by `plan`
  std::size_t horizon_used = 0;
  bool reached = false;  // decreased the sub-flock cost by at least delta
};

// Adaptive-horizon optimization over a sub-flock. Grows h from
// max(1, longest fixed prefix) to h_max, with 2 beta h B_N particles, and
// stops at the first h whose plan lowers the sub-flock cost by at least
// `delta`. When no horizon succeeds the h_max attempt is returned.
LocalResult local_ampc(const FlockState& subflock, const AccelerationPlan& constraint, double delta,
                       const LocalAmpcConfig& cfg, const CostFunction& cost, std::uint64_t seed);

// Centralized adaptive-horizon MPC: one optimizer over the whole flock per
// step, horizon reset to 1 after every step.
class AmpcController final : public Controller {
 public:
  AmpcController(ControllerConfig cfg, FlockState s0, std::uint64_t seed);

  const StepRecord& advance() override;
};

// Samples s0 from `box` and runs AMPC for at most cfg.m steps.
RunResult ampc_run(const ControllerConfig& cfg, std::size_t birds, const InitBox& box, std::uint64_t seed,
                   const TraceSink& sink = {});
RunResult ampc_run(const ControllerConfig& cfg, const FlockState& s0, std::uint64_t seed,
                   const TraceSink& sink = {});

}  // namespace dampc
