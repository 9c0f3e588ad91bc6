#include "deepmpr/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace deepmpr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double wrap_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2*pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

void reflect_into_arena(MobilityState& s, double side) {
  for (int guard = 0; guard < 64; ++guard) {
    bool moved = false;
    if (s.position.x < 0.0) {
      s.position.x = -s.position.x;
      moved = true;
    } else if (s.position.x > side) {
      s.position.x = 2.0 * side - s.position.x;
      moved = true;
    }
    if (moved) {
      s.direction = wrap_angle(std::numbers::pi - s.direction);
      s.mean_direction = wrap_angle(std::numbers::pi - s.mean_direction);
    }
    bool moved_y = false;
    if (s.position.y < 0.0) {
      s.position.y = -s.position.y;
      moved_y = true;
    } else if (s.position.y > side) {
      s.position.y = 2.0 * side - s.position.y;
      moved_y = true;
    }
    if (moved_y) {
      s.direction = wrap_angle(-s.direction);
      s.mean_direction = wrap_angle(-s.mean_direction);
    }
    if (!moved && !moved_y) return;
  }
  // pathological step length; clamp
  s.position.x = std::clamp(s.position.x, 0.0, side);
  s.position.y = std::clamp(s.position.y, 0.0, side);
}

MobilityState step(const MobilityState& state, Seconds dt, double side, double n1, double n2) {
  MobilityState next = state;
  const double a = state.alpha;
  const double noise_scale = std::sqrt(std::max(0.0, 1.0 - a * a));
  next.speed = a * state.speed + (1.0 - a) * state.mean_speed + noise_scale * state.speed_sigma * n1;
  next.speed = std::max(0.0, next.speed);
  next.direction =
      a * state.direction + (1.0 - a) * state.mean_direction + noise_scale * state.direction_sigma * n2;
  next.position.x += next.speed * std::cos(next.direction) * dt;
  next.position.y += next.speed * std::sin(next.direction) * dt;
  next.direction = wrap_angle(next.direction);
  reflect_into_arena(next, side);
  return next;
}

std::vector<MobilityState> place_initial(std::size_t n, double side, const MobilityParams& params,
                                         Rng& rng) {
  std::vector<MobilityState> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    MobilityState s;
    s.position.x = uniform(rng, 0.0, side);
    s.position.y = uniform(rng, 0.0, side);
    s.direction = uniform(rng, 0.0, kTwoPi);
    s.mean_direction = s.direction;
    s.mean_speed = params.speed_max > params.speed_min ? uniform(rng, params.speed_min, params.speed_max)
                                                       : params.speed_min;
    s.speed = s.mean_speed;
    s.alpha = params.alpha;
    s.speed_sigma = params.speed_sigma;
    s.direction_sigma = params.direction_sigma;
    out.push_back(s);
  }
  return out;
}

}  // namespace deepmpr
