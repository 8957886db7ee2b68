#include "dampc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dampc {

namespace {

constexpr double kPi = std::numbers::pi;

double downwash_split(double w) noexcept { return (4.0 - kPi) * w / 8.0; }

// Fills `out` with the blocked intervals bird i sees and returns the merged
// measure. Birds without a heading see nothing.
double blocked_measure(std::span<const BirdState> birds, std::size_t i, const WingConfig& cfg,
                       std::vector<AngularInterval>& out) {
  out.clear();
  for (std::size_t j = 0; j < birds.size(); ++j) {
    if (j == i) continue;
    if (auto iv = blocked_interval(birds[i], birds[j], cfg)) out.push_back(*iv);
  }
  return union_measure(out);
}

}  // namespace

void WingConfig::validate() const {
  if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("wing span w must be positive");
  if (!(theta > 0.0 && theta < kPi)) throw std::invalid_argument("view angle theta must lie in (0, pi)");
}

Sym2 Sym2::inverse() const noexcept {
  const double d = det();
  return {yy / d, -xy / d, xx / d};
}

UpwashParams UpwashParams::defaults(double w) {
  return {{(12.0 + kPi) * w / 16.0, 1.0}, {0.0, 0.0}, Sym2{}, Sym2{}};
}

void UpwashParams::validate() const {
  if (!is_finite(mu1) || !is_finite(mu2)) throw std::invalid_argument("upwash means must be finite");
  if (!sigma1.positive_definite() || !sigma2.positive_definite())
    throw std::invalid_argument("upwash covariances must be positive-definite");
}

std::optional<RelativeFrame> relative_frame(const BirdState& i, const BirdState& j) noexcept {
  const double speed = norm(i.velocity);
  if (speed == 0.0) return std::nullopt;
  const Vec2 heading = i.velocity * (1.0 / speed);
  const Vec2 d = j.position - i.position;
  const double ahead = dot(d, heading);
  const double side = cross(heading, d);
  return RelativeFrame{std::abs(side), ahead, ahead > 0.0, side > 0.0};
}

std::optional<AngularInterval> blocked_interval(const RelativeFrame& f, const WingConfig& cfg) noexcept {
  // Front(j, i) is required for both guard disjuncts: birds behind cannot
  // occlude a forward cone.
  if (!f.front) return std::nullopt;
  const double h = f.lateral;
  const double v = f.ahead;
  if (!(h < cfg.w || (h - cfg.w) / v < std::tan(cfg.theta))) return std::nullopt;
  const double lo = std::max((kPi - cfg.theta) / 2.0, std::atan2(v, h + cfg.w));
  const double hi = std::min((kPi + cfg.theta) / 2.0, std::atan2(v, h - cfg.w));
  if (!(lo < hi)) return std::nullopt;
  if (f.left) return AngularInterval{kPi - hi, kPi - lo};
  return AngularInterval{lo, hi};
}

std::optional<AngularInterval> blocked_interval(const BirdState& i, const BirdState& j,
                                                const WingConfig& cfg) noexcept {
  const auto frame = relative_frame(i, j);
  if (!frame) return std::nullopt;
  return blocked_interval(*frame, cfg);
}

double union_measure(std::span<AngularInterval> intervals) noexcept {
  if (intervals.empty()) return 0.0;
  std::sort(intervals.begin(), intervals.end(),
            [](const AngularInterval& a, const AngularInterval& b) { return a.lo < b.lo; });
  double total = 0.0;
  double cur_lo = intervals.front().lo;
  double cur_hi = intervals.front().hi;
  for (const AngularInterval& iv : intervals.subspan(1)) {
    if (iv.lo > cur_hi) {
      total += cur_hi - cur_lo;
      cur_lo = iv.lo;
      cur_hi = iv.hi;
    } else {
      cur_hi = std::max(cur_hi, iv.hi);
    }
  }
  return total + (cur_hi - cur_lo);
}

double clear_view(std::span<const BirdState> birds, const WingConfig& cfg) {
  std::vector<AngularInterval> buf;
  double sum = 0.0;
  for (std::size_t i = 0; i < birds.size(); ++i) sum += blocked_measure(birds, i, cfg, buf) / cfg.theta;
  return sum;
}

double velocity_matching(std::span<const BirdState> birds) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < birds.size(); ++i) {
    const double ni = norm(birds[i].velocity);
    for (std::size_t j = 0; j < i; ++j) {
      const double denom = ni + norm(birds[j].velocity);
      if (denom == 0.0) continue;
      const double r = norm(birds[i].velocity - birds[j].velocity) / denom;
      sum += r * r;
    }
  }
  return sum;
}

std::vector<double> upwash_per_bird(std::span<const BirdState> birds, const WingConfig& cfg,
                                    const UpwashParams& up) {
  const CostModel model(CostParams{cfg, up});
  std::vector<double> um(birds.size(), 0.0);
  for (std::size_t i = 0; i < birds.size(); ++i) {
    const double si = norm(birds[i].velocity);
    if (si == 0.0) continue;
    double acc = 0.0;
    for (std::size_t j = 0; j < birds.size(); ++j) {
      if (j == i) continue;
      const double sj = norm(birds[j].velocity);
      if (sj == 0.0) continue;
      const auto f = relative_frame(birds[i], birds[j]);
      if (!f || !f->front) continue;
      acc += model.upwash_pair(*f, dot(birds[i].velocity, birds[j].velocity) / (si * sj));
    }
    um[i] = std::clamp(acc, 0.0, 1.0);
  }
  return um;
}

double upwash_benefit(std::span<const BirdState> birds, const WingConfig& cfg, const UpwashParams& up) {
  double sum = 0.0;
  for (double um : upwash_per_bird(birds, cfg, up)) sum += 1.0 - um;
  return sum;
}

CostModel::CostModel(const CostParams& params)
    : params_(params),
      inv1_(params.upwash.sigma1.inverse()),
      inv2_(params.upwash.sigma2.inverse()),
      split_(downwash_split(params.wing.w)),
      cone_lo_((kPi - params.wing.theta) / 2.0),
      cone_hi_((kPi + params.wing.theta) / 2.0),
      tan_theta_(std::tan(params.wing.theta)) {
  params_.validate();
}

double CostModel::upwash_pair(const RelativeFrame& f, double alignment) const noexcept {
  const double s = std::erf(2.0 * std::numbers::sqrt2 * (f.lateral - split_));
  const Vec2 p{f.lateral, f.ahead};
  if (f.lateral >= split_) return alignment * s * std::exp(-0.5 * inv1_.quadratic(p - params_.upwash.mu1));
  return s * std::exp(-0.5 * inv2_.quadratic(p - params_.upwash.mu2));
}

CostBreakdown CostModel::evaluate(std::span<const BirdState> birds) const {
  const std::size_t n = birds.size();
  const double w = params_.wing.w;

  thread_local std::vector<AngularInterval> intervals;
  thread_local std::vector<double> speed;
  speed.resize(n);
  for (std::size_t i = 0; i < n; ++i) speed[i] = norm(birds[i].velocity);

  CostBreakdown out;
  for (std::size_t i = 0; i < n; ++i) {
    const BirdState& bi = birds[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double denom = speed[i] + speed[j];
      if (denom == 0.0) continue;
      const double r = norm(bi.velocity - birds[j].velocity) / denom;
      out.vm += r * r;
    }

    if (speed[i] == 0.0) {
      out.ub += 1.0;
      continue;
    }
    const Vec2 heading = bi.velocity * (1.0 / speed[i]);
    intervals.clear();
    double um = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec2 d = birds[j].position - bi.position;
      const double ahead = dot(d, heading);
      if (!(ahead > 0.0)) continue;
      const double side = cross(heading, d);
      const double lateral = std::abs(side);

      if (lateral < w || (lateral - w) / ahead < tan_theta_) {
        const double lo = std::max(cone_lo_, std::atan2(ahead, lateral + w));
        const double hi = std::min(cone_hi_, std::atan2(ahead, lateral - w));
        if (lo < hi) intervals.push_back(side > 0.0 ? AngularInterval{kPi - hi, kPi - lo} : AngularInterval{lo, hi});
      }
      if (speed[j] != 0.0) {
        const double alignment = dot(bi.velocity, birds[j].velocity) / (speed[i] * speed[j]);
        um += upwash_pair(RelativeFrame{lateral, ahead, true}, alignment);
      }
    }
    out.cv += union_measure(intervals) / params_.wing.theta;
    out.ub += 1.0 - std::clamp(um, 0.0, 1.0);
  }

  const double dcv = out.cv - kOptimalCv;
  const double dvm = out.vm - kOptimalVm;
  const double dub = out.ub - kOptimalUb;
  out.total = dcv * dcv + dvm * dvm + dub * dub;
  return out;
}

}  // namespace dampc
