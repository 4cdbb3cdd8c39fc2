#include "vdc/spatial.hpp"

#include <cmath>

namespace vdc {

std::string FrameId::name() const {
  switch (kind) {
    case Kind::Ground: return "G";
    case Kind::Body: return "B" + std::to_string(index);
    case Kind::Tip: return "T" + std::to_string(index);
    case Kind::Cartesian: return "X";
  }
  return "?";
}

FrameMismatch::FrameMismatch(FrameId expected, FrameId got, const char* where)
    : std::logic_error(std::string(where) + ": expected frame " + expected.name() + ", got " +
                       got.name()) {}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  if (((r.transpose() * r) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

FrameTransform::FrameTransform(const Mat3& rotation, const Vec3& offset, FrameId from, FrameId to)
    : rotation_(rotation), offset_(offset), from_(from), to_(to) {
  if (!is_rotation(rotation)) {
    throw std::invalid_argument("FrameTransform " + from.name() + "->" + to.name() +
                                ": rotation is not orthonormal with det +1");
  }
  if (!offset.allFinite()) {
    throw std::invalid_argument("FrameTransform " + from.name() + "->" + to.name() +
                                ": non-finite offset");
  }
}

FrameTransform joint_rotation(const Vec3& axis, double angle, FrameId from, FrameId to) {
  return FrameTransform(FrameTransform::Unchecked{},
                        Eigen::AngleAxisd(angle, axis).toRotationMatrix(), Vec3::Zero(), from,
                        to);
}

FrameTransform compose(const FrameTransform& a_to_b, const FrameTransform& b_to_c) {
  if (!(a_to_b.to() == b_to_c.from())) throw FrameMismatch(a_to_b.to(), b_to_c.from(), "compose");
  return FrameTransform(FrameTransform::Unchecked{}, a_to_b.rotation() * b_to_c.rotation(),
                        a_to_b.offset() + a_to_b.rotation() * b_to_c.offset(), a_to_b.from(),
                        b_to_c.to());
}

Mat3 skew(const Vec3& r) {
  Mat3 s;
  s << 0.0, -r.z(), r.y(),
       r.z(), 0.0, -r.x(),
       -r.y(), r.x(), 0.0;
  return s;
}

Mat6 build_transform(const FrameTransform& t) {
  Mat6 u = Mat6::Zero();
  const Mat3& r = t.rotation();
  u.topLeftCorner<3, 3>() = r;
  u.bottomLeftCorner<3, 3>() = skew(t.offset()) * r;
  u.bottomRightCorner<3, 3>() = r;
  return u;
}

SpatialVelocity transform_velocity(const FrameTransform& t, const SpatialVelocity& v) {
  if (!(v.frame == t.from())) throw FrameMismatch(t.from(), v.frame, "transform_velocity");
  const Mat3& r = t.rotation();
  // U^T [v; w] = [R^T (v + w x r); R^T w]
  return {r.transpose() * (v.linear + v.angular.cross(t.offset())), r.transpose() * v.angular,
          t.to()};
}

SpatialForce transform_force(const FrameTransform& t, const SpatialForce& f) {
  if (!(f.frame == t.to())) throw FrameMismatch(t.to(), f.frame, "transform_force");
  const Mat3& r = t.rotation();
  const Vec3 force = r * f.force;
  return {force, t.offset().cross(force) + r * f.moment, t.from()};
}

double power(const SpatialVelocity& v, const SpatialForce& f) {
  if (!(v.frame == f.frame)) throw FrameMismatch(v.frame, f.frame, "power");
  return v.linear.dot(f.force) + v.angular.dot(f.moment);
}

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) : q_(w, x, y, z) {
  const double n = q_.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    throw std::invalid_argument("UnitQuaternion: cannot normalize a zero or non-finite quaternion");
  }
  q_.coeffs() /= n;
}

UnitQuaternion::UnitQuaternion(const Eigen::Quaterniond& q)
    : UnitQuaternion(q.w(), q.x(), q.y(), q.z()) {}

UnitQuaternion UnitQuaternion::from_rotation(const Mat3& r) {
  return UnitQuaternion(Eigen::Quaterniond(r));
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  return UnitQuaternion(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())));
}

UnitQuaternion UnitQuaternion::negated() const {
  return UnitQuaternion(-q_.w(), -q_.x(), -q_.y(), -q_.z());
}

Vec3 quaternion_error(const UnitQuaternion& desired, const UnitQuaternion& actual) {
  const Eigen::Quaterniond e = desired.eigen() * actual.eigen().conjugate();
  // q and -q are the same rotation; pick the representative with w >= 0.
  return e.w() < 0.0 ? Vec3(-2.0 * e.vec()) : Vec3(2.0 * e.vec());
}

}  // namespace vdc
