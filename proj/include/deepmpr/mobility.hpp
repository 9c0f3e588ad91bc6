#ifndef DEEPMPR_MOBILITY_HPP_
#define DEEPMPR_MOBILITY_HPP_

#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/rng.hpp"

namespace deepmpr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct MobilityParams {
  double alpha = 0.75;
  double speed_sigma = 0.5;      // m/s
  double direction_sigma = 0.4;  // rad
  Seconds tick = 0.1;
  double speed_min = 1.0;  // range the per-node mean speed is drawn from
  double speed_max = 1.0;

  bool operator==(const MobilityParams&) const = default;
};

// Gauss-Markov state of one node.
struct MobilityState {
  Vec2 position;
  double speed = 0.0;
  double direction = 0.0;
  double mean_speed = 0.0;
  double mean_direction = 0.0;
  double alpha = 0.75;
  double speed_sigma = 0.5;
  double direction_sigma = 0.4;
};

// Wraps an angle into [0, 2*pi).
double wrap_angle(double radians);

// Folds a position back into the square, reflecting direction (and the mean
// direction, so the process does not keep pulling into the wall) on every
// violated axis. Repeats until inside.
void reflect_into_arena(MobilityState& state, double side);

// One first-order autoregressive update followed by a straight-line move of
// speed' * dt along direction'. `n1`/`n2` are standard-normal draws.
MobilityState step(const MobilityState& state, Seconds dt, double side, double n1, double n2);

// Uniform positions, uniform headings, speed = mean speed drawn once per node
// from [speed_min, speed_max].
std::vector<MobilityState> place_initial(std::size_t n, double side, const MobilityParams& params,
                                         Rng& rng);

}  // namespace deepmpr

#endif  // DEEPMPR_MOBILITY_HPP_
