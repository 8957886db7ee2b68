#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dampc/flock.hpp"

namespace dampc {

// Per-bird acceleration sequences. Each bird owns a fixed prefix of concrete
// accelerations; every step past the prefix is "not fixed yet" (nfy). A bird
// with an empty prefix has no fixed solution.
class AccelerationPlan {
 public:
  AccelerationPlan() = default;
  explicit AccelerationPlan(std::size_t birds) : seq_(birds) {}
  explicit AccelerationPlan(std::vector<std::vector<Vec2>> sequences) : seq_(std::move(sequences)) {}

  std::size_t bird_count() const noexcept { return seq_.size(); }
  std::span<const Vec2> fixed(std::size_t bird) const { return seq_.at(bird); }
  std::size_t fixed_length(std::size_t bird) const { return seq_.at(bird).size(); }
  bool is_fixed(std::size_t bird) const { return !seq_.at(bird).empty(); }
  bool all_fixed() const noexcept;
  std::size_t longest() const noexcept;
  // Every bird has exactly `horizon` concrete entries.
  bool is_rectangular(std::size_t horizon) const noexcept;

  // nullopt means nfy.
  std::optional<Vec2> at(std::size_t bird, std::size_t step) const;

  void fix(std::size_t bird, std::vector<Vec2> sequence) { seq_.at(bird) = std::move(sequence); }

  AccelerationPlan subset(std::span<const std::size_t> birds) const;
  // First entry of every sequence; birds without one get zero acceleration.
  ActionVector first_actions() const;

  friend bool operator==(const AccelerationPlan&, const AccelerationPlan&) = default;

 private:
  std::vector<std::vector<Vec2>> seq_;
};

// Cost of a (sub)flock state; lower is better.
using CostFunction = std::function<double(std::span<const BirdState>)>;

struct SwarmConfig {
  std::size_t particles = 40;
  std::size_t iterations = 40;
  double inertia = 0.7298;
  double cognitive = 1.49618;
  double social = 1.49618;
  std::uint64_t seed = 0;

  void validate() const;
};

// p = 2 beta h B, at least 2.
std::size_t particle_count(double beta, std::size_t horizon, std::size_t birds) noexcept;

struct OptimizeResult {
  AccelerationPlan best_plan;     // concrete, `horizon` entries per bird
  FlockState state_after_first;
  FlockState state_after_last;
  double achieved_cost = 0.0;     // horizon_cost(state, best_plan)
};

// min over tau = 1..h of J(state after tau steps of `plan`). The plan must be
// concrete and rectangular; entries are applied verbatim.
double horizon_cost(const FlockState& state, const AccelerationPlan& plan, const CostFunction& cost);

// Global-best particle swarm over every entry that `constraint` leaves free.
// Fixed prefixes are applied verbatim; free entries are decision variables in
// the box [-rho v_max, rho v_max]^2, projected with clamp_action during the
// rollout. The returned plan stores the projected (applied) accelerations.
// Particle 0 starts at the all-zero completion.
OptimizeResult optimize(const FlockState& state, const AccelerationPlan& constraint, std::size_t horizon,
                        const SwarmConfig& cfg, const ActionLimits& limits, const CostFunction& cost);

}  // namespace dampc
