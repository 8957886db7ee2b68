#include "dampc/smc.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dampc/ampc.hpp"
#include "dampc/dampc.hpp"
#include "dampc/parallel.hpp"
#include "dampc/random.hpp"

namespace dampc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Mean of the finite entries; NaN when there are none.
double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    if (std::isnan(x)) continue;
    sum += x;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : kNaN;
}

}  // namespace

std::string to_string(ControllerKind kind) { return kind == ControllerKind::dampc ? "dampc" : "ampc"; }

ControllerKind parse_controller_kind(const std::string& name) {
  const std::string s = lower(name);
  if (s == "dampc") return ControllerKind::dampc;
  if (s == "ampc") return ControllerKind::ampc;
  throw std::invalid_argument("unknown controller '" + name + "' (expected dampc or ampc)");
}

std::unique_ptr<Controller> make_controller(ControllerKind kind, const ControllerConfig& cfg, FlockState s0,
                                            std::uint64_t seed) {
  if (kind == ControllerKind::ampc) return std::make_unique<AmpcController>(cfg, std::move(s0), seed);
  return std::make_unique<DampcController>(cfg, std::move(s0), seed);
}

std::string to_string(SampleSizeMode mode) { return mode == SampleSizeMode::literal ? "literal" : "chernoff"; }

SampleSizeMode parse_sample_size_mode(const std::string& name) {
  const std::string s = lower(name);
  if (s == "literal") return SampleSizeMode::literal;
  if (s == "chernoff") return SampleSizeMode::chernoff;
  throw std::invalid_argument("unknown sample-size mode '" + name + "' (expected literal or chernoff)");
}

std::size_t required_runs(double epsilon, double delta, SampleSizeMode mode) {
  const double scale = mode == SampleSizeMode::literal ? epsilon : epsilon * epsilon;
  const double n = 4.0 * std::log(2.0 / delta) / scale;
  return n <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(n));
}

std::string to_string(DisturbanceSpec::Kind kind) {
  return kind == DisturbanceSpec::Kind::displacement ? "displacement" : "crash";
}

DisturbanceSpec::Kind parse_disturbance_kind(const std::string& name) {
  const std::string s = lower(name);
  if (s == "displacement") return DisturbanceSpec::Kind::displacement;
  if (s == "crash") return DisturbanceSpec::Kind::crash;
  throw std::invalid_argument("unknown disturbance kind '" + name + "' (expected displacement or crash)");
}

void DisturbanceSpec::validate() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
    throw std::invalid_argument("disturbance magnitude must be finite and non-negative");
  if (direction && (!is_finite(*direction) || norm(*direction) == 0.0))
    throw std::invalid_argument("disturbance direction must be a finite non-zero vector");
}

FlockState apply_disturbance(const FlockState& state, const DisturbanceSpec& spec, Rng& rng) {
  spec.validate();
  if (state.size() == 0) throw std::invalid_argument("apply_disturbance: empty flock");
  // Draw the target and direction even when unused so the stream position
  // does not depend on the magnitude.
  const auto drawn = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(state.size()));
  const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const std::size_t target = spec.target.value_or(std::min(drawn, state.size() - 1));
  if (target >= state.size()) throw std::out_of_range("apply_disturbance: target bird out of range");

  FlockState out = state;
  if (spec.magnitude == 0.0) return out;
  BirdState& bird = out.birds[target];
  if (spec.kind == DisturbanceSpec::Kind::displacement) {
    const Vec2 dir = spec.direction ? *spec.direction * (1.0 / norm(*spec.direction))
                                    : Vec2{std::cos(angle), std::sin(angle)};
    bird.position += dir * spec.magnitude;
  } else {
    bird.velocity = Vec2{};
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (birds < 1) throw std::invalid_argument("experiment needs at least one bird");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (runs && *runs < 1) throw std::invalid_argument("runs must be at least 1");
  controller.validate();
  init.validate();
  if (disturbance) disturbance->validate();
}

std::size_t ExperimentConfig::run_count() const {
  return runs ? *runs : required_runs(epsilon, delta, sample_size);
}

RunRecord execute_run(const ExperimentConfig& cfg, std::size_t index) {
  const auto started = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.index = index;
  rec.seed = cfg.base_seed + index;

  Rng init_rng(derive_seed(rec.seed, {0}));
  Rng disturb_rng(derive_seed(rec.seed, {3}));
  const std::size_t m = cfg.controller.m;
  auto ctrl = make_controller(cfg.kind, cfg.controller, sample_initial(init_rng, cfg.birds, cfg.init), rec.seed);

  const auto scheduled = [&](std::size_t t) {
    return cfg.disturbance && std::find(cfg.disturbance->schedule.begin(), cfg.disturbance->schedule.end(), t) !=
                                  cfg.disturbance->schedule.end();
  };
  for (std::size_t n = 0; n < m; ++n) {
    if (scheduled(n)) ctrl->disturb(apply_disturbance(ctrl->state(), *cfg.disturbance, disturb_rng));
    if (ctrl->at_goal()) break;
    ctrl->advance();
  }

  const RunResult result = ctrl->result();
  rec.success = result.success;
  rec.steps = result.steps;
  rec.initial_cost = result.trace.front().cost.total;
  rec.final_cost = result.trace.back().cost.total;

  double k_sum = 0.0;
  double h_sum = 0.0;
  for (std::size_t t = 1; t < result.trace.size(); ++t) {
    k_sum += static_cast<double>(result.trace[t].k);
    h_sum += static_cast<double>(result.trace[t].max_horizon());
    rec.max_rounds = std::max(rec.max_rounds, result.trace[t].rounds);
  }
  if (rec.steps > 0) {
    const auto steps = static_cast<double>(rec.steps);
    rec.avg_k_until = k_sum / steps;
    rec.avg_horizon = h_sum / steps;
    const double pad = static_cast<double>(m > rec.steps ? m - rec.steps : 0);
    rec.avg_k_over_m = (k_sum + pad * static_cast<double>(result.trace.back().k_next)) / (steps + pad);
  } else {
    rec.avg_k_until = rec.avg_k_over_m = rec.avg_horizon = kNaN;
  }

  if (rec.success && cfg.post_goal_steps > 0) {
    double after = 0.0;
    for (std::size_t n = 0; n < cfg.post_goal_steps; ++n) after += static_cast<double>(ctrl->advance().k);
    rec.avg_k_after = after / static_cast<double>(cfg.post_goal_steps);
  }

  if (rec.success && cfg.disturbance && cfg.disturbance->schedule.empty()) {
    FlockState disturbed = apply_disturbance(result.trace.back().state, *cfg.disturbance, disturb_rng);
    auto recovery = make_controller(cfg.kind, cfg.controller, std::move(disturbed), derive_seed(rec.seed, {4}));
    const RunResult r = run_to_goal(*recovery, m);
    rec.recovered = r.success;
    rec.recovery_steps = r.steps;
  }

  if (cfg.keep_traces) rec.result = result;
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

RunStatistics aggregate(const std::vector<RunRecord>& records) {
  RunStatistics s;
  s.runs = records.size();
  std::vector<double> steps, horizon, k_until, k_over, k_after, k_bad, recovered;
  for (const RunRecord& r : records) {
    s.wall_seconds_total += r.wall_seconds;
    if (r.recovered) recovered.push_back(*r.recovered ? 1.0 : 0.0);
    if (!r.success) {
      k_bad.push_back(r.avg_k_until);
      continue;
    }
    ++s.successes;
    steps.push_back(static_cast<double>(r.steps));
    horizon.push_back(r.avg_horizon);
    k_until.push_back(r.avg_k_until);
    k_over.push_back(r.avg_k_over_m);
    k_after.push_back(r.avg_k_after.value_or(kNaN));
  }
  s.success_rate = s.runs ? static_cast<double>(s.successes) / static_cast<double>(s.runs) : 0.0;
  s.avg_convergence_steps = mean(steps);
  s.avg_horizon = mean(horizon);
  s.avg_k_until_convergence = mean(k_until);
  s.avg_k_over_m = mean(k_over);
  s.avg_k_after_convergence = mean(k_after);
  s.avg_k_bad_runs = mean(k_bad);
  if (!recovered.empty()) s.recovery_rate = mean(recovered);
  s.wall_seconds_mean = s.runs ? s.wall_seconds_total / static_cast<double>(s.runs) : 0.0;
  return s;
}

Estimate estimate(const ExperimentConfig& cfg, const RunSink& sink) {
  cfg.validate();
  const std::size_t n = cfg.run_count();
  if (n == 0) throw std::invalid_argument("estimate: no runs requested");
  Estimate est;
  est.records.resize(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) { est.records[i] = execute_run(cfg, i); });
  if (sink)
    for (const RunRecord& r : est.records) sink(r);
  est.stats = aggregate(est.records);
  est.mu = est.stats.success_rate;
  return est;
}

}  // namespace dampc
