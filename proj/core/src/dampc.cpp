#include "dampc/dampc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dampc/parallel.hpp"
#include "dampc/random.hpp"

namespace dampc {

void NeighborhoodPolicy::validate(std::size_t birds) const {
  if (!(1 <= k_min && k_min <= k && k <= k_max && k_max <= birds))
    throw std::invalid_argument("neighborhood policy requires 1 <= k_min <= k <= k_max <= B");
}

std::size_t neigh_size(double cost, std::size_t k, bool level_advanced, const NeighborhoodPolicy& policy) {
  const auto lo = static_cast<long long>(policy.k_min);
  const auto hi = static_cast<long long>(policy.k_max);
  const auto kk = static_cast<long long>(k);
  if (!level_advanced) return static_cast<std::size_t>(std::min(kk + 1, hi));
  const auto shrink = static_cast<long long>(std::ceil(1.0 - cost / static_cast<double>(k)));
  return static_cast<std::size_t>(std::min(std::max(kk - shrink, lo), hi));
}

ConsensusOutcome consensus_step(const FlockState& state, const AccelerationPlan& initial, std::size_t k,
                                std::size_t level_index, const ControllerConfig& cfg, const CostModel& model,
                                std::uint64_t step_seed) {
  const std::size_t b = state.size();
  if (initial.bird_count() != b) throw std::invalid_argument("consensus_step: plan size differs from flock size");
  if (k < 1 || k > b) throw std::out_of_range("consensus_step: k must lie in [1, B]");

  const LocalAmpcConfig local{cfg.h_max, cfg.beta, cfg.swarm, cfg.limits};
  const CostFunction cost = [&model](std::span<const BirdState> birds) { return model.total(birds); };
  const double remaining =
      level_index < cfg.m ? static_cast<double>(cfg.m - level_index) : 1.0;

  ConsensusOutcome out;
  out.plans = initial;
  out.proposals.resize(b);

  while (!out.plans.all_fixed()) {
    ConsensusRound round;
    for (std::size_t i = 0; i < b; ++i)
      if (!out.plans.is_fixed(i)) round.unfixed.push_back(i);

    const std::size_t r = out.rounds.size();
    std::vector<std::vector<std::size_t>> hood(round.unfixed.size());
    parallel_for(round.unfixed.size(), cfg.threads, [&](std::size_t slot) {
      const std::size_t i = round.unfixed[slot];
      hood[slot] = neighbors(state, i, k);
      const FlockState sub = state.subset(hood[slot]);
      const double delta = model.total(sub) / remaining;
      out.proposals[i] = local_ampc(sub, out.plans.subset(hood[slot]), delta, local, cost,
                                    derive_seed(step_seed, {r, i}));
    });

    std::size_t best = 0;
    for (std::size_t slot = 1; slot < round.unfixed.size(); ++slot)
      if (out.proposals[round.unfixed[slot]].cost_hat < out.proposals[round.unfixed[best]].cost_hat) best = slot;

    round.winner = round.unfixed[best];
    round.subflock = hood[best];
    const LocalResult& win = out.proposals[round.winner];
    round.winner_cost = win.cost_hat;
    for (std::size_t pos = 0; pos < round.subflock.size(); ++pos) {
      const std::size_t bird = round.subflock[pos];
      if (out.plans.is_fixed(bird)) continue;  // fixed sequences are never revised
      const auto seq = win.plan.fixed(pos);
      out.plans.fix(bird, {seq.begin(), seq.end()});
    }
    out.rounds.push_back(std::move(round));
  }
  return out;
}

ConsensusOutcome consensus_step(const FlockState& state, std::size_t k, std::size_t level_index,
                                const ControllerConfig& cfg, const CostModel& model, std::uint64_t step_seed) {
  return consensus_step(state, AccelerationPlan(state.size()), k, level_index, cfg, model, step_seed);
}

FlockState lookahead_state(const FlockState& state, const AccelerationPlan& plans) {
  FlockState s = state;
  const std::size_t h = plans.longest();
  for (std::size_t t = 0; t < h; ++t) {
    ActionVector a(s.size());
    for (std::size_t b = 0; b < a.size(); ++b) a[b] = plans.at(b, t).value_or(Vec2{});
    s = step(s, a);
  }
  return s;
}

DampcController::DampcController(ControllerConfig cfg, FlockState s0, std::uint64_t seed)
    : Controller(std::move(cfg), s0, seed, s0.size()) {}

const StepRecord& DampcController::advance() {
  const std::size_t t = actions_.size();
  const std::size_t k_used = k_;
  last_ = consensus_step(state_, k_used, ledger_.index(), config_, model_, derive_seed(seed_, {2, t}));

  ActionVector first = last_.plans.first_actions();
  FlockState next = step(state_, first);
  const double lookahead = model_.total(lookahead_state(state_, last_.plans));
  const bool advanced = ledger_.try_advance(lookahead);
  k_ = neigh_size(lookahead, k_used, advanced, policy());

  state_ = std::move(next);
  actions_.push_back(std::move(first));
  StepRecord& row = record(k_used, lookahead, advanced);
  row.horizons.resize(state_.size());
  for (std::size_t b = 0; b < state_.size(); ++b) row.horizons[b] = last_.plans.fixed_length(b);
  row.rounds = last_.rounds.size();
  for (const ConsensusRound& r : last_.rounds) row.unfixed_per_round.push_back(r.unfixed.size());
  return row;
}

RunResult dampc_run(const ControllerConfig& cfg, const FlockState& s0, std::uint64_t seed, const TraceSink& sink) {
  DampcController ctrl(cfg, s0, seed);
  return run_to_goal(ctrl, cfg.m, sink);
}

RunResult dampc_run(const ControllerConfig& cfg, std::size_t birds, const InitBox& box, std::uint64_t seed,
                    const TraceSink& sink) {
  Rng rng(derive_seed(seed, {0}));
  return dampc_run(cfg, sample_initial(rng, birds, box), seed, sink);
}

}  // namespace dampc
