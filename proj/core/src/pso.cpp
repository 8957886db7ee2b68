#include "dampc/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dampc/random.hpp"

namespace dampc {

bool AccelerationPlan::all_fixed() const noexcept {
  return std::all_of(seq_.begin(), seq_.end(), [](const auto& s) { return !s.empty(); });
}

std::size_t AccelerationPlan::longest() const noexcept {
  std::size_t h = 0;
  for (const auto& s : seq_) h = std::max(h, s.size());
  return h;
}

bool AccelerationPlan::is_rectangular(std::size_t horizon) const noexcept {
  return std::all_of(seq_.begin(), seq_.end(), [&](const auto& s) { return s.size() == horizon; });
}

std::optional<Vec2> AccelerationPlan::at(std::size_t bird, std::size_t step) const {
  const auto& s = seq_.at(bird);
  if (step < s.size()) return s[step];
  return std::nullopt;
}

AccelerationPlan AccelerationPlan::subset(std::span<const std::size_t> birds) const {
  std::vector<std::vector<Vec2>> out;
  out.reserve(birds.size());
  for (std::size_t b : birds) out.push_back(seq_.at(b));
  return AccelerationPlan(std::move(out));
}

ActionVector AccelerationPlan::first_actions() const {
  ActionVector a(seq_.size());
  for (std::size_t b = 0; b < seq_.size(); ++b)
    if (!seq_[b].empty()) a[b] = seq_[b].front();
  return a;
}

void SwarmConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("swarm needs at least two particles");
  if (iterations < 1) throw std::invalid_argument("swarm needs at least one iteration");
}

std::size_t particle_count(double beta, std::size_t horizon, std::size_t birds) noexcept {
  const double p = std::ceil(2.0 * beta * static_cast<double>(horizon) * static_cast<double>(birds));
  return std::max<std::size_t>(2, static_cast<std::size_t>(p));
}

double horizon_cost(const FlockState& state, const AccelerationPlan& plan, const CostFunction& cost) {
  if (plan.bird_count() != state.size())
    throw std::invalid_argument("horizon_cost: plan and state disagree on the number of birds");
  const std::size_t h = plan.longest();
  if (h == 0 || !plan.is_rectangular(h))
    throw std::invalid_argument("horizon_cost: plan must be concrete and rectangular");

  std::vector<BirdState> birds = state.birds;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t tau = 0; tau < h; ++tau) {
    for (std::size_t b = 0; b < birds.size(); ++b) advance_bird(birds[b], plan.fixed(b)[tau]);
    best = std::min(best, cost(birds));
  }
  return best;
}

namespace {

// Maps swarm coordinates onto a concrete plan and rolls it out.
class Rollout {
 public:
  Rollout(const FlockState& state, const AccelerationPlan& constraint, std::size_t horizon,
          const ActionLimits& limits, const CostFunction& cost)
      : state_(state), constraint_(constraint), horizon_(horizon), limits_(limits), cost_(cost) {
    slot_.assign(state.size() * horizon, kFixed);
    for (std::size_t b = 0; b < state.size(); ++b)
      for (std::size_t t = constraint.fixed_length(b); t < horizon; ++t) slot_[b * horizon + t] = free_++;
  }

  std::size_t free_slots() const noexcept { return free_; }

  // Cost of the completion encoded by `x` (2 coordinates per free slot). When
  // `applied` is non-null it receives the accelerations actually applied.
  double evaluate(std::span<const double> x, std::vector<std::vector<Vec2>>* applied) {
    birds_ = state_.birds;
    if (applied) applied->assign(birds_.size(), std::vector<Vec2>(horizon_));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < horizon_; ++t) {
      for (std::size_t b = 0; b < birds_.size(); ++b) {
        const std::size_t slot = slot_[b * horizon_ + t];
        const Vec2 a = slot == kFixed
                           ? constraint_.fixed(b)[t]
                           : clamp_action(birds_[b].velocity, {x[2 * slot], x[2 * slot + 1]}, limits_);
        if (applied) (*applied)[b][t] = a;
        advance_bird(birds_[b], a);
      }
      best = std::min(best, cost_(birds_));
    }
    return best;
  }

 private:
  static constexpr std::size_t kFixed = std::numeric_limits<std::size_t>::max();

  const FlockState& state_;
  const AccelerationPlan& constraint_;
  std::size_t horizon_;
  ActionLimits limits_;
  const CostFunction& cost_;
  std::vector<std::size_t> slot_;
  std::size_t free_ = 0;
  std::vector<BirdState> birds_;
};

OptimizeResult finish(const FlockState& state, AccelerationPlan plan, const CostFunction& cost) {
  OptimizeResult r;
  r.achieved_cost = horizon_cost(state, plan, cost);
  r.state_after_first = step(state, plan.first_actions());
  FlockState s = state;
  for (std::size_t t = 0; t < plan.longest(); ++t) {
    ActionVector a(plan.bird_count());
    for (std::size_t b = 0; b < a.size(); ++b) a[b] = plan.fixed(b)[t];
    s = step(s, a);
  }
  r.state_after_last = std::move(s);
  r.best_plan = std::move(plan);
  return r;
}

}  // namespace

OptimizeResult optimize(const FlockState& state, const AccelerationPlan& constraint, std::size_t horizon,
                        const SwarmConfig& cfg, const ActionLimits& limits, const CostFunction& cost) {
  if (horizon == 0) throw std::invalid_argument("optimize: horizon must be at least 1");
  if (constraint.bird_count() != state.size())
    throw std::invalid_argument("optimize: constraint and state disagree on the number of birds");
  if (constraint.longest() > horizon)
    throw std::invalid_argument("optimize: fixed prefix longer than the horizon");
  cfg.validate();
  limits.validate();

  Rollout rollout(state, constraint, horizon, limits, cost);
  const std::size_t dims = 2 * rollout.free_slots();
  std::vector<std::vector<Vec2>> applied;

  if (dims == 0) {
    rollout.evaluate({}, &applied);
    return finish(state, AccelerationPlan(std::move(applied)), cost);
  }

  const double bound = limits.acceleration_bound();
  const double vclamp = bound;  // half the box width
  const std::size_t n = cfg.particles;

  Rng rng(cfg.seed);
  std::vector<double> pos(n * dims), vel(n * dims), best_pos(n * dims);
  std::vector<double> best_cost(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t d = 0; d < dims; ++d) {
      pos[p * dims + d] = p == 0 ? 0.0 : uniform(rng, -bound, bound);
      vel[p * dims + d] = uniform(rng, -vclamp, vclamp);
    }
  }

  auto particle = [&](std::vector<double>& v, std::size_t p) {
    return std::span<double>(v.data() + p * dims, dims);
  };

  std::size_t global = 0;
  for (std::size_t p = 0; p < n; ++p) {
    best_cost[p] = rollout.evaluate(particle(pos, p), nullptr);
    if (best_cost[p] < best_cost[global]) global = p;
  }
  best_pos = pos;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t p = 0; p < n; ++p) {
      auto x = particle(pos, p);
      auto v = particle(vel, p);
      const auto pb = particle(best_pos, p);
      const auto gb = particle(best_pos, global);
      for (std::size_t d = 0; d < dims; ++d) {
        const double r1 = uniform01(rng);
        const double r2 = uniform01(rng);
        double vd = cfg.inertia * v[d] + cfg.cognitive * r1 * (pb[d] - x[d]) + cfg.social * r2 * (gb[d] - x[d]);
        vd = std::clamp(vd, -vclamp, vclamp);
        double xd = x[d] + vd;
        if (xd < -bound || xd > bound) {
          xd = std::clamp(xd, -bound, bound);
          vd = 0.0;
        }
        x[d] = xd;
        v[d] = vd;
      }
    }
    // Synchronous update: personal bests first, then one deterministic
    // reduction to the global best (lowest index wins ties).
    for (std::size_t p = 0; p < n; ++p) {
      const double c = rollout.evaluate(particle(pos, p), nullptr);
      if (c < best_cost[p]) {
        best_cost[p] = c;
        std::copy_n(pos.begin() + static_cast<std::ptrdiff_t>(p * dims), dims,
                    best_pos.begin() + static_cast<std::ptrdiff_t>(p * dims));
      }
    }
    global = 0;
    for (std::size_t p = 1; p < n; ++p)
      if (best_cost[p] < best_cost[global]) global = p;
  }

  rollout.evaluate(particle(best_pos, global), &applied);
  return finish(state, AccelerationPlan(std::move(applied)), cost);
}

}  // namespace dampc
