#include "vdc/trajectory.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace vdc {

QuinticSample quintic(double p0, double p1, double t_f, double t) {
  if (!(t_f > 0.0)) throw std::invalid_argument("quintic: t_f must be positive");
  const double s = std::clamp(t / t_f, 0.0, 1.0);
  const double d = p1 - p0;
  const double s2 = s * s;
  const double s3 = s2 * s;
  QuinticSample out;
  out.position = p0 + d * s3 * (10.0 - 15.0 * s + 6.0 * s2);
  if (t > 0.0 && t < t_f) {
    out.velocity = d * 30.0 * s2 * (1.0 - s) * (1.0 - s) / t_f;
    out.acceleration = d * 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (t_f * t_f);
  }
  return out;
}

PathSample square_path(const SquarePathSpec& spec, double t) {
  const Vec3 a = spec.first_direction * spec.side;
  const Vec3 b = spec.second_direction * spec.side;
  const std::array<Vec3, 5> corners = {spec.start, spec.start + a, spec.start + a + b,
                                       spec.start + b, spec.start};
  PathSample out;
  if (t <= 0.0 || t >= 4.0 * spec.segment_time) {
    out.position = spec.start;
    return out;
  }
  const int seg = std::min(3, static_cast<int>(t / spec.segment_time));
  const double local = t - seg * spec.segment_time;
  const QuinticSample s = quintic(0.0, 1.0, spec.segment_time, local);
  const Vec3 delta = corners[seg + 1] - corners[seg];
  out.position = corners[seg] + s.position * delta;
  out.velocity = s.velocity * delta;
  out.acceleration = s.acceleration * delta;
  return out;
}

}  // namespace vdc
