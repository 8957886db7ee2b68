#pragma once

// Independent reference computations and random generators shared by the unit
// and acceptance tests. Nothing here calls into the cost implementation.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "dampc/flock.hpp"
#include "dampc/random.hpp"

namespace dampc::testing {

// Fraction-of-cone clear view by casting `rays` evenly spaced rays through
// each bird's view cone. A ray is blocked when it crosses the 2w segment
// centred on a bird in front, perpendicular to the observer's heading.
inline double ray_cast_clear_view(const std::vector<BirdState>& birds, double w, double theta,
                                  std::size_t rays) {
  const double lo = (std::numbers::pi - theta) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < birds.size(); ++i) {
    const Vec2 v = birds[i].velocity;
    const double speed = std::hypot(v.x, v.y);
    if (speed == 0.0) continue;
    const Vec2 fwd{v.x / speed, v.y / speed};
    const Vec2 right{fwd.y, -fwd.x};

    struct Segment {
      double across;
      double ahead;
    };
    std::vector<Segment> segs;
    for (std::size_t j = 0; j < birds.size(); ++j) {
      if (j == i) continue;
      const Vec2 d{birds[j].position.x - birds[i].position.x, birds[j].position.y - birds[i].position.y};
      const double ahead = d.x * fwd.x + d.y * fwd.y;
      if (ahead > 0.0) segs.push_back({d.x * right.x + d.y * right.y, ahead});
    }

    std::size_t blocked = 0;
    for (std::size_t r = 0; r < rays; ++r) {
      const double alpha = lo + theta * (static_cast<double>(r) + 0.5) / static_cast<double>(rays);
      const double cot = std::cos(alpha) / std::sin(alpha);
      for (const Segment& s : segs) {
        if (std::abs(s.ahead * cot - s.across) <= w) {
          ++blocked;
          break;
        }
      }
    }
    total += static_cast<double>(blocked) / static_cast<double>(rays);
  }
  return total;
}

// Flock with positions in [0, extent]^2 and random headings. `spread` is the
// maximal angular deviation of the headings from a common direction.
inline std::vector<BirdState> random_flock(Rng& rng, std::size_t n, double extent, double spread) {
  const double base = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::vector<BirdState> birds(n);
  for (BirdState& b : birds) {
    b.position = {uniform(rng, 0.0, extent), uniform(rng, 0.0, extent)};
    const double angle = base + uniform(rng, -spread, spread);
    const double speed = uniform(rng, 0.2, 1.5);
    b.velocity = {speed * std::cos(angle), speed * std::sin(angle)};
  }
  return birds;
}

inline FlockState make_flock(std::vector<BirdState> birds) {
  FlockState s;
  s.birds = std::move(birds);
  return s;
}

}  // namespace dampc::testing
