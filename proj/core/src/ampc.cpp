#include "dampc/ampc.hpp"

#include <limits>
#include <stdexcept>

#include "dampc/random.hpp"

namespace dampc {

double dynamic_threshold(double prev_level, std::size_t i, std::size_t m) {
  if (i < 1 || i > m) throw std::out_of_range("dynamic_threshold: level index must lie in [1, m]");
  return prev_level / static_cast<double>(m - i + 1);
}

double initial_threshold(double initial_level, double phi, std::size_t m) {
  if (m == 0) throw std::out_of_range("initial_threshold: m must be positive");
  return (initial_level - phi) / static_cast<double>(m);
}

LocalResult local_ampc(const FlockState& subflock, const AccelerationPlan& constraint, double delta,
                       const LocalAmpcConfig& cfg, const CostFunction& cost, std::uint64_t seed) {
  if (subflock.size() == 0) throw std::invalid_argument("local_ampc: empty sub-flock");
  if (constraint.bird_count() != subflock.size())
    throw std::invalid_argument("local_ampc: constraint and sub-flock disagree on the number of birds");
  if (cfg.h_max < 1) throw std::invalid_argument("local_ampc: h_max must be at least 1");
  if (constraint.longest() > cfg.h_max)
    throw std::invalid_argument("local_ampc: fixed prefix longer than h_max");

  const double current = cost(subflock.birds);
  LocalResult out;
  // Frozen prefixes are always simulated in full before free actions.
  for (std::size_t h = std::max<std::size_t>(1, constraint.longest()); h <= cfg.h_max; ++h) {
    SwarmConfig swarm = cfg.swarm;
    swarm.particles = particle_count(cfg.beta, h, subflock.size());
    swarm.seed = derive_seed(seed, {h});
    OptimizeResult r = optimize(subflock, constraint, h, swarm, cfg.limits, cost);

    out.s_hat = std::move(r.state_after_last);
    out.s_tilde = std::move(r.state_after_first);
    out.plan = std::move(r.best_plan);
    out.cost_hat = r.achieved_cost;
    out.horizon_used = h;
    out.reached = current - out.cost_hat >= delta;
    if (out.reached) break;
  }
  return out;
}

AmpcController::AmpcController(ControllerConfig cfg, FlockState s0, std::uint64_t seed)
    : Controller(std::move(cfg), s0, seed, s0.size()) {}

const StepRecord& AmpcController::advance() {
  const std::size_t t = actions_.size();
  const std::size_t b = state_.size();
  const CostFunction cost = [this](std::span<const BirdState> birds) { return model_.total(birds); };
  const double level = ledger_.current();
  const double delta = ledger_.threshold();

  OptimizeResult best;
  std::size_t horizon = 0;
  bool accepted = false;
  for (std::size_t h = 1; h <= config_.h_max && !accepted; ++h) {
    SwarmConfig swarm = config_.swarm;
    swarm.particles = particle_count(config_.beta, h, b);
    swarm.seed = derive_seed(seed_, {1, t, h});
    best = optimize(state_, AccelerationPlan(b), h, swarm, config_.limits, cost);
    horizon = h;
    accepted = level - best.achieved_cost > delta;
  }
  if (accepted) ledger_.try_advance(best.achieved_cost);

  actions_.push_back(best.best_plan.first_actions());
  state_ = std::move(best.state_after_first);
  StepRecord& row = record(b, best.achieved_cost, accepted);
  row.horizons.assign(b, horizon);
  row.rounds = 1;
  row.unfixed_per_round = {b};
  return row;
}

RunResult ampc_run(const ControllerConfig& cfg, const FlockState& s0, std::uint64_t seed, const TraceSink& sink) {
  AmpcController ctrl(cfg, s0, seed);
  return run_to_goal(ctrl, cfg.m, sink);
}

RunResult ampc_run(const ControllerConfig& cfg, std::size_t birds, const InitBox& box, std::uint64_t seed,
                   const TraceSink& sink) {
  Rng rng(derive_seed(seed, {0}));
  return ampc_run(cfg, sample_initial(rng, birds, box), seed, sink);
}

}  // namespace dampc
