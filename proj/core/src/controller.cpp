#include "dampc/controller.hpp"

#include <algorithm>
#include <stdexcept>

#include "dampc/ampc.hpp"

namespace dampc {

void ControllerConfig::validate() const {
  if (!(phi > 0.0)) throw std::invalid_argument("phi must be positive");
  if (h_max < 1) throw std::invalid_argument("h_max must be at least 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (k_min < 1) throw std::invalid_argument("k_min must be at least 1");
  if (k_max != 0 && k_max < k_min) throw std::invalid_argument("k_max must not be below k_min");
  if (swarm.iterations < 1) throw std::invalid_argument("swarm iterations must be at least 1");
  limits.validate();
  cost.validate();
}

LevelLedger::LevelLedger(double initial_cost, double phi, std::size_t m)
    : levels_{initial_cost}, phi_(phi), m_(std::max<std::size_t>(m, 1)) {}

double LevelLedger::threshold() const {
  const std::size_t t = index();
  if (t == 1) return initial_threshold(levels_.front(), phi_, m_);
  // Past the budget the denominator bottoms out at 1.
  return dynamic_threshold(current(), std::min(t, m_), m_);
}

bool LevelLedger::try_advance(double candidate) {
  const double delta = threshold();
  if (!(current() - candidate > delta)) return false;
  levels_.push_back(candidate);
  deltas_.push_back(delta);
  return true;
}

std::size_t StepRecord::max_horizon() const noexcept {
  std::size_t h = 0;
  for (std::size_t x : horizons) h = std::max(h, x);
  return h;
}

Controller::Controller(ControllerConfig cfg, FlockState s0, std::uint64_t seed, std::size_t k0)
    : config_(std::move(cfg)), model_(config_.cost), seed_(seed), state_(s0), s0_(std::move(s0)) {
  if (state_.size() == 0) throw std::invalid_argument("controller needs at least one bird");
  config_.validate();
  const std::size_t b = state_.size();
  if (config_.k_max == 0 || config_.k_max > b) config_.k_max = b;
  config_.k_min = std::min(config_.k_min, config_.k_max);
  k_ = std::clamp(k0, config_.k_min, config_.k_max);
  ledger_ = LevelLedger(model_.total(state_), config_.phi, config_.m);
  record(k_, ledger_.current(), false);
}

StepRecord& Controller::record(std::size_t k_used, double lookahead, bool advanced) {
  StepRecord r;
  r.t = trace_.size();
  r.state = state_;
  r.cost = model_.evaluate(state_);
  r.level_index = ledger_.index() - 1;
  r.level = ledger_.current();
  r.lookahead_cost = lookahead;
  r.level_advanced = advanced;
  r.k = k_used;
  r.k_next = k_;
  trace_.push_back(std::move(r));
  return trace_.back();
}

void Controller::disturb(FlockState perturbed) {
  if (perturbed.size() != state_.size()) throw std::invalid_argument("disturb: bird count changed");
  state_ = std::move(perturbed);
  // Replace the last row: the disturbance happens between steps.
  StepRecord& last = trace_.back();
  last.state = state_;
  last.cost = model_.evaluate(state_);
}

RunResult Controller::result() const {
  RunResult r;
  r.s0 = s0_;
  r.actions = actions_;
  r.trace = trace_;
  r.ledger = ledger_;
  r.success = at_goal();
  r.steps = actions_.size();
  return r;
}

RunResult run_to_goal(Controller& ctrl, std::size_t budget, const TraceSink& sink) {
  if (sink) sink(ctrl.trace().back());
  for (std::size_t n = 0; n < budget && !ctrl.at_goal(); ++n) {
    const StepRecord& row = ctrl.advance();
    if (sink) sink(row);
  }
  return ctrl.result();
}

}  // namespace dampc
