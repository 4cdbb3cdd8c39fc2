#pragma once

// Frame-tagged 6D spatial algebra. Velocities are stacked [linear; angular],
// forces [force; moment]. A FrameTransform from frame {A} to frame {B} holds
// the rotation ^A R_B and the offset ^A r_AB, both expressed in {A}.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vdc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct FrameId {
  enum class Kind : std::uint8_t {
    Ground,     // {G} = {T_0}
    Body,       // {B_i}, located at joint i
    Tip,        // {T_i}, the distal cutting point of body i
    Cartesian,  // ground orientation, origin at the end-effector
  };
  Kind kind = Kind::Ground;
  std::uint8_t index = 0;

  static constexpr FrameId ground() { return {Kind::Ground, 0}; }
  static constexpr FrameId body(int i) { return {Kind::Body, static_cast<std::uint8_t>(i)}; }
  static constexpr FrameId tip(int i) {
    return i == 0 ? ground() : FrameId{Kind::Tip, static_cast<std::uint8_t>(i)};
  }
  static constexpr FrameId cartesian() { return {Kind::Cartesian, 0}; }

  friend constexpr bool operator==(FrameId a, FrameId b) {
    return a.kind == b.kind && a.index == b.index;
  }
  std::string name() const;
};

class FrameMismatch : public std::logic_error {
 public:
  FrameMismatch(FrameId expected, FrameId got, const char* where);
};

struct SpatialVelocity {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();
  FrameId frame;

  static SpatialVelocity zero(FrameId f) { return {Vec3::Zero(), Vec3::Zero(), f}; }
  static SpatialVelocity from_stacked(const Vec6& v, FrameId f) {
    return {v.head<3>(), v.tail<3>(), f};
  }
  Vec6 stacked() const {
    Vec6 out;
    out << linear, angular;
    return out;
  }
  bool finite() const { return linear.allFinite() && angular.allFinite(); }
};

struct SpatialForce {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  FrameId frame;

  static SpatialForce zero(FrameId f) { return {Vec3::Zero(), Vec3::Zero(), f}; }
  static SpatialForce from_stacked(const Vec6& v, FrameId f) {
    return {v.head<3>(), v.tail<3>(), f};
  }
  Vec6 stacked() const {
    Vec6 out;
    out << force, moment;
    return out;
  }
  bool finite() const { return force.allFinite() && moment.allFinite(); }
};

/// Checks R^T R = 1 and det R = +1 within `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);

class FrameTransform {
 public:
  /// Throws std::invalid_argument when `rotation` is not a proper rotation.
  FrameTransform(const Mat3& rotation, const Vec3& offset, FrameId from, FrameId to);

  static FrameTransform identity(FrameId from, FrameId to) {
    return FrameTransform(Mat3::Identity(), Vec3::Zero(), from, to);
  }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& offset() const { return offset_; }
  FrameId from() const { return from_; }
  FrameId to() const { return to_; }

 private:
  struct Unchecked {};
  FrameTransform(Unchecked, const Mat3& rotation, const Vec3& offset, FrameId from, FrameId to)
      : rotation_(rotation), offset_(offset), from_(from), to_(to) {}
  friend FrameTransform compose(const FrameTransform&, const FrameTransform&);
  friend FrameTransform joint_rotation(const Vec3&, double, FrameId, FrameId);

  Mat3 rotation_;
  Vec3 offset_;
  FrameId from_;
  FrameId to_;
};

/// Rotation by `angle` about the unit `axis`; zero offset. Used for joints.
FrameTransform joint_rotation(const Vec3& axis, double angle, FrameId from, FrameId to);

/// ^A T_B composed with ^B T_C gives ^A T_C.
FrameTransform compose(const FrameTransform& a_to_b, const FrameTransform& b_to_c);

/// Cross-product matrix: skew(r) * x == r.cross(x).
Mat3 skew(const Vec3& r);

/// 6x6 map [[R, 0], [skew(r) R, R]]. Applied to forces of the `to` frame it
/// yields the equivalent force in the `from` frame; its transpose carries
/// velocities from `from` to `to`.
Mat6 build_transform(const FrameTransform& t);

/// ^B V -> ^T V = U^T ^B V. Requires v.frame == t.from().
SpatialVelocity transform_velocity(const FrameTransform& t, const SpatialVelocity& v);

/// ^T F -> ^B F = U ^T F. Requires f.frame == t.to().
SpatialForce transform_force(const FrameTransform& t, const SpatialForce& f);

/// Instantaneous power V^T F; frames must agree.
double power(const SpatialVelocity& v, const SpatialForce& f);

class UnitQuaternion {
 public:
  UnitQuaternion() : q_(Eigen::Quaterniond::Identity()) {}
  /// Normalizes; throws std::invalid_argument on a (near) zero quaternion.
  UnitQuaternion(double w, double x, double y, double z);
  explicit UnitQuaternion(const Eigen::Quaterniond& q);
  static UnitQuaternion from_rotation(const Mat3& r);
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

  double w() const { return q_.w(); }
  Vec3 vec() const { return q_.vec(); }
  const Eigen::Quaterniond& eigen() const { return q_; }
  Mat3 rotation() const { return q_.toRotationMatrix(); }
  UnitQuaternion negated() const;

 private:
  Eigen::Quaterniond q_;
};

/// Orientation error 2 * vec(q_d * q^-1), taking the shortest rotation.
/// Expressed in the ground frame; zero iff the two orientations coincide.
Vec3 quaternion_error(const UnitQuaternion& desired, const UnitQuaternion& actual);

}  // namespace vdc
