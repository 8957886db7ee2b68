#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dampc/random.hpp"
#include "dampc/vec2.hpp"

namespace dampc {

struct BirdState {
  Vec2 position;
  Vec2 velocity;

  friend bool operator==(const BirdState&, const BirdState&) = default;
};

// Positions and velocities of every bird at one time step. Bird identity is
// its index and never changes during a run.
struct FlockState {
  std::vector<BirdState> birds;
  std::int64_t time = 0;

  std::size_t size() const noexcept { return birds.size(); }

  // Sub-flock made of the birds at `indices`, in the given order.
  FlockState subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const FlockState&, const FlockState&) = default;
};

struct ActionLimits {
  double v_max = 2.0;
  double rho = 0.9;

  // Largest acceleration magnitude any bird can ever apply.
  double acceleration_bound() const noexcept { return rho * v_max; }
  // Throws std::invalid_argument unless v_max > 0 and rho in (0, 1).
  void validate() const;
};

struct InitBox {
  Vec2 pos_lo{0.0, 0.0};
  Vec2 pos_hi{3.0, 3.0};
  Vec2 vel_lo{0.25, 0.25};
  Vec2 vel_hi{0.75, 0.75};

  void validate() const;
};

// One acceleration per bird.
using ActionVector = std::vector<Vec2>;

// One transition of the flock MDP:
//   v' = v + a,  x' = x + v   (position advances with the pre-step velocity).
// Throws std::invalid_argument on size mismatch or non-finite input.
FlockState step(const FlockState& state, std::span<const Vec2> actions);

// Unchecked in-place variant used inside rollouts.
inline void advance_bird(BirdState& bird, Vec2 acceleration) noexcept {
  bird.position += bird.velocity;
  bird.velocity += acceleration;
}

// Projects `proposal` radially so that |a| <= rho |velocity| and
// |velocity + a| <= v_max.
Vec2 clamp_action(Vec2 velocity, Vec2 proposal, const ActionLimits& limits) noexcept;

// I.i.d. uniform positions and velocities inside `box`.
FlockState sample_initial(Rng& rng, std::size_t count, const InitBox& box);

// The k birds closest to bird i (Euclidean distance between positions),
// always including i. Distance ties go to the lower index. The result is
// sorted by ascending bird index.
std::vector<std::size_t> neighbors(const FlockState& state, std::size_t i, std::size_t k);

}  // namespace dampc
