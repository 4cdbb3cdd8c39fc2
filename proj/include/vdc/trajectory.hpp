#pragma once

#include "vdc/spatial.hpp"

namespace vdc {

struct QuinticSample {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

/// p0 + (p1 - p0)(10s^3 - 15s^4 + 6s^5), s = t / t_f; t is clamped to [0, t_f].
QuinticSample quintic(double p0, double p1, double t_f, double t);

struct SquarePathSpec {
  Vec3 start = Vec3::Zero();
  double side = 0.10;
  double segment_time = 5.0;  // t_f
  // Corner order: start, +z, +y, -z, back. The first edge climbs towards a
  // wall above the start pose.
  Vec3 first_direction = Vec3::UnitZ();
  Vec3 second_direction = Vec3::UnitY();
};

struct PathSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

/// Four quintic edges around the square; holds the start corner after 4 t_f.
PathSample square_path(const SquarePathSpec& spec, double t);

}  // namespace vdc
