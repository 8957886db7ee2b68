#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "dampc/flock.hpp"
#include "dampc/vec2.hpp"

namespace dampc {

struct WingConfig {
  double w = 1.0;                        // wing span, position units
  double theta = std::numbers::pi / 4;   // view-cone angle, radians

  void validate() const;
};

// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  double det() const noexcept { return xx * yy - xy * xy; }
  bool positive_definite() const noexcept { return xx > 0.0 && det() > 0.0; }
  Sym2 inverse() const noexcept;
  // p^T M p
  double quadratic(Vec2 p) const noexcept { return xx * p.x * p.x + 2.0 * xy * p.x * p.y + yy * p.y * p.y; }
};

// Gaussian upwash model. Means live in the observer's (lateral, ahead) frame.
struct UpwashParams {
  Vec2 mu1;      // upwash peak
  Vec2 mu2;      // downwash centre
  Sym2 sigma1;
  Sym2 sigma2;

  // mu1 = ((12 + pi) w / 16, 1), mu2 = (0, 0), identity covariances.
  static UpwashParams defaults(double w);
  void validate() const;
};

struct CostParams {
  WingConfig wing;
  UpwashParams upwash = UpwashParams::defaults(1.0);

  void validate() const {
    wing.validate();
    upwash.validate();
  }
};

struct CostBreakdown {
  double cv = 0.0;
  double vm = 0.0;
  double ub = 0.0;
  double total = 0.0;

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

// Optimal metric values: CV* = 0, VM* = 0, UB* = 1.
inline constexpr double kOptimalCv = 0.0;
inline constexpr double kOptimalVm = 0.0;
inline constexpr double kOptimalUb = 1.0;

// Position of bird j in bird i's heading frame.
struct RelativeFrame {
  double lateral;  // |perpendicular offset|, >= 0
  double ahead;    // signed offset along i's heading, positive in front
  bool front;      // ahead > 0
  bool left = false;  // j lies on i's left-hand side
};

// nullopt when bird i has zero velocity (no heading).
std::optional<RelativeFrame> relative_frame(const BirdState& i, const BirdState& j) noexcept;

struct AngularInterval {
  double lo;
  double hi;

  double length() const noexcept { return hi - lo; }
};

// Angles are measured from i's right-lateral axis, so the view cone spans
// [(pi - theta)/2, (pi + theta)/2]. The interval is computed for a blocker on
// the right and mirrored about the heading for one on the left.
std::optional<AngularInterval> blocked_interval(const BirdState& i, const BirdState& j,
                                                const WingConfig& cfg) noexcept;
std::optional<AngularInterval> blocked_interval(const RelativeFrame& frame,
                                                const WingConfig& cfg) noexcept;

// Measure of the union of `intervals` by sort-and-sweep. Reorders the input.
double union_measure(std::span<AngularInterval> intervals) noexcept;

double clear_view(std::span<const BirdState> birds, const WingConfig& cfg);
double velocity_matching(std::span<const BirdState> birds) noexcept;
double upwash_benefit(std::span<const BirdState> birds, const WingConfig& cfg, const UpwashParams& up);

// Per-bird upwash um_i in [0, 1].
std::vector<double> upwash_per_bird(std::span<const BirdState> birds, const WingConfig& cfg,
                                    const UpwashParams& up);

// Precomputes covariance inverses and cone constants so that repeated
// evaluation inside optimizer rollouts does not allocate.
class CostModel {
 public:
  explicit CostModel(const CostParams& params = {});

  const CostParams& params() const noexcept { return params_; }

  CostBreakdown evaluate(std::span<const BirdState> birds) const;
  double total(std::span<const BirdState> birds) const { return evaluate(birds).total; }

  CostBreakdown evaluate(const FlockState& s) const { return evaluate(std::span<const BirdState>(s.birds)); }
  double total(const FlockState& s) const { return evaluate(s).total; }

  // Upwash contribution of front bird j to bird i, given i's frame of j.
  double upwash_pair(const RelativeFrame& frame, double alignment) const noexcept;

 private:
  CostParams params_;
  Sym2 inv1_;
  Sym2 inv2_;
  double split_;      // (4 - pi) w / 8
  double cone_lo_;
  double cone_hi_;
  double tan_theta_;
};

}  // namespace dampc
