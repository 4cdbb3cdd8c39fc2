#include "support.hpp"
#include "vdc/spatial.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace vdc {
namespace {

using test::Rng;
using test::uvec;

TEST(Spatial, RejectsImproperRotation) {
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1;
  EXPECT_THROW(FrameTransform(reflect, Vec3::Zero(), FrameId::body(1), FrameId::tip(1)),
               std::invalid_argument);
  EXPECT_THROW(FrameTransform(2.0 * Mat3::Identity(), Vec3::Zero(), FrameId::body(1), FrameId::tip(1)),
               std::invalid_argument);
}

TEST(Spatial, FrameTagsAreChecked) {
  const auto t = FrameTransform::identity(FrameId::body(1), FrameId::tip(1));
  EXPECT_THROW(transform_velocity(t, SpatialVelocity::zero(FrameId::tip(1))), FrameMismatch);
  EXPECT_THROW(transform_force(t, SpatialForce::zero(FrameId::body(1))), FrameMismatch);
  EXPECT_THROW(power(SpatialVelocity::zero(FrameId::body(1)), SpatialForce::zero(FrameId::body(2))),
               FrameMismatch);
  EXPECT_EQ(FrameId::tip(0), FrameId::ground());
}

// A force f at the offset point r produces the moment r x f at the origin.
TEST(Spatial, PureOffsetForce) {
  const Vec3 r(0.3, -0.1, 0.2), f(1.0, 2.0, -0.5);
  const FrameTransform t(Mat3::Identity(), r, FrameId::body(1), FrameId::tip(1));
  const SpatialForce out = transform_force(t, {f, Vec3::Zero(), FrameId::tip(1)});
  EXPECT_EQ(out.frame, FrameId::body(1));
  EXPECT_LT((out.force - f).norm(), 1e-15);
  EXPECT_LT((out.moment - r.cross(f)).norm(), 1e-15);

  // A point at r on a body spinning at w moves with w x r.
  const Vec3 w(0.0, 0.0, 2.0);
  const SpatialVelocity v = transform_velocity(t, {Vec3::Zero(), w, FrameId::body(1)});
  EXPECT_LT((v.linear - w.cross(r)).norm(), 1e-15);
}

TEST(Spatial, MatrixFormMatchesFunctions) {
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const FrameTransform t(test::random_rotation(rng), uvec<3>(rng), FrameId::body(2), FrameId::tip(2));
    const Mat6 u = build_transform(t);
    const Vec6 x = uvec<6>(rng);
    const Vec6 v = transform_velocity(t, SpatialVelocity::from_stacked(x, FrameId::body(2))).stacked();
    const Vec6 f = transform_force(t, SpatialForce::from_stacked(x, FrameId::tip(2))).stacked();
    EXPECT_LT((v - u.transpose() * x).norm(), 1e-13);
    EXPECT_LT((f - u * x).norm(), 1e-13);
  }
}

TEST(Spatial, PowerIsFrameInvariant) {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const FrameTransform t(test::random_rotation(rng), uvec<3>(rng), FrameId::body(1), FrameId::tip(1));
    const auto v = SpatialVelocity::from_stacked(uvec<6>(rng), FrameId::body(1));
    const auto f = SpatialForce::from_stacked(uvec<6>(rng), FrameId::tip(1));
    EXPECT_NEAR(power(transform_velocity(t, v), f), power(v, transform_force(t, f)), 1e-13);
  }
}

TEST(Spatial, CompositionChainsTransforms) {
  Rng rng(5);
  const FrameTransform ab(test::random_rotation(rng), uvec<3>(rng), FrameId::ground(), FrameId::body(1));
  const FrameTransform bc(test::random_rotation(rng), uvec<3>(rng), FrameId::body(1), FrameId::tip(1));
  const FrameTransform ac = compose(ab, bc);
  EXPECT_EQ(ac.from(), FrameId::ground());
  EXPECT_EQ(ac.to(), FrameId::tip(1));
  EXPECT_LT((ac.rotation() - ab.rotation() * bc.rotation()).norm(), 1e-14);
  EXPECT_LT((ac.offset() - (ab.offset() + ab.rotation() * bc.offset())).norm(), 1e-14);
  EXPECT_THROW(compose(bc, ab), FrameMismatch);
}

TEST(Spatial, SkewIsCrossProduct) {
  const Vec3 a(1, -2, 3), b(0.5, 4, -1);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(Quaternion, TenDegreesAboutZ) {
  using std::numbers::pi;
  const auto qd = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), 10.0 * pi / 180.0);
  const Vec3 e = quaternion_error(qd, UnitQuaternion());
  EXPECT_NEAR(e.z(), 2.0 * std::sin(5.0 * pi / 180.0), 1e-15);
  EXPECT_NEAR(e.z(), 0.1743114855, 1e-10);
  EXPECT_NEAR(e.head<2>().norm(), 0.0, 1e-15);
}

TEST(Quaternion, ErrorTakesShortestRotation) {
  Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    const auto a = UnitQuaternion::from_rotation(test::random_rotation(rng));
    const auto b = UnitQuaternion::from_rotation(test::random_rotation(rng));
    EXPECT_LT((quaternion_error(a, b) - quaternion_error(a.negated(), b)).norm(), 1e-14);
    EXPECT_LT(quaternion_error(a, a).norm(), 1e-15);
  }
}

TEST(Quaternion, ZeroIsRejected) { EXPECT_THROW(UnitQuaternion(0, 0, 0, 0), std::invalid_argument); }

}  // namespace
}  // namespace vdc
