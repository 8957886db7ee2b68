#include "dampc/flock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dampc {

FlockState FlockState::subset(std::span<const std::size_t> indices) const {
  FlockState out;
  out.time = time;
  out.birds.reserve(indices.size());
  for (std::size_t i : indices) out.birds.push_back(birds.at(i));
  return out;
}

void ActionLimits::validate() const {
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw std::invalid_argument("v_max must be a positive finite number");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
}

void InitBox::validate() const {
  const auto ordered = [](Vec2 lo, Vec2 hi) {
    return is_finite(lo) && is_finite(hi) && lo.x <= hi.x && lo.y <= hi.y;
  };
  if (!ordered(pos_lo, pos_hi)) throw std::invalid_argument("position box has lo > hi");
  if (!ordered(vel_lo, vel_hi)) throw std::invalid_argument("velocity box has lo > hi");
}

FlockState step(const FlockState& state, std::span<const Vec2> actions) {
  if (actions.size() != state.size()) {
    throw std::invalid_argument("step: expected " + std::to_string(state.size()) +
                                " actions, got " + std::to_string(actions.size()));
  }
  FlockState next = state;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const BirdState& b = state.birds[i];
    if (!is_finite(b.position) || !is_finite(b.velocity) || !is_finite(actions[i]))
      throw std::invalid_argument("step: non-finite input for bird " + std::to_string(i));
    advance_bird(next.birds[i], actions[i]);
  }
  ++next.time;
  return next;
}

Vec2 clamp_action(Vec2 velocity, Vec2 proposal, const ActionLimits& limits) noexcept {
  const double speed = norm(velocity);
  if (speed > limits.v_max) {
    // Outside the feasible set already; brake as hard as allowed.
    const double brake = std::min(limits.rho, 1.0 - limits.v_max / speed);
    return velocity * -brake;
  }

  Vec2 a = proposal;
  const double bound = limits.rho * speed;
  const double mag = norm(a);
  if (mag > bound) a = mag > 0.0 ? a * (bound / mag) : Vec2{};
  if (bound == 0.0) return Vec2{};

  const Vec2 v_next = velocity + a;
  if (norm_sq(v_next) > limits.v_max * limits.v_max) {
    // Largest s in [0, 1] with |v + s a| = v_max; |v| <= v_max keeps the
    // discriminant non-negative and the root non-negative.
    const double aa = norm_sq(a);
    const double va = dot(velocity, a);
    const double disc = va * va - aa * (norm_sq(velocity) - limits.v_max * limits.v_max);
    double s = (-va + std::sqrt(std::max(disc, 0.0))) / aa;
    s = std::clamp(s * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()), 0.0, 1.0);
    a *= s;
  }
  return a;
}

FlockState sample_initial(Rng& rng, std::size_t count, const InitBox& box) {
  if (count == 0) throw std::invalid_argument("sample_initial: flock must have at least one bird");
  box.validate();
  FlockState s;
  s.birds.resize(count);
  for (BirdState& b : s.birds) {
    b.position = {uniform(rng, box.pos_lo.x, box.pos_hi.x), uniform(rng, box.pos_lo.y, box.pos_hi.y)};
    b.velocity = {uniform(rng, box.vel_lo.x, box.vel_hi.x), uniform(rng, box.vel_lo.y, box.vel_hi.y)};
  }
  return s;
}

std::vector<std::size_t> neighbors(const FlockState& state, std::size_t i, std::size_t k) {
  const std::size_t n = state.size();
  if (i >= n) throw std::out_of_range("neighbors: bird index out of range");
  if (k < 1 || k > n) throw std::out_of_range("neighbors: k must lie in [1, B]");

  std::vector<std::size_t> others;
  others.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) others.push_back(j);

  const Vec2 origin = state.birds[i].position;
  std::vector<double> dist(n);
  for (std::size_t j : others) dist[j] = norm_sq(state.birds[j].position - origin);

  std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1), others.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  std::vector<std::size_t> out(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1));
  out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dampc
