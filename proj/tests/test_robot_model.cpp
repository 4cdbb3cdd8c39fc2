#include "support.hpp"
#include "vdc/robot_model.hpp"
#include "vdc/simulation.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

namespace vdc {
namespace {

using test::Rng;
using test::rel_err;

class DefaultArm : public ::testing::Test {
 protected:
  RobotModel model = RobotModel::default_arm();
  int n = model.dof();
  Rng rng{21};
};

TEST_F(DefaultArm, JacobianMatchesFiniteDifference) {
  for (int k = 0; k < 50; ++k) {
    const VecX q = test::uvecx(rng, n), dir = test::uvecx(rng, n);
    const double h = 1e-6;
    const Pose a = model.forward_kinematics(q + h * dir).end_effector();
    const Pose b = model.forward_kinematics(q - h * dir).end_effector();
    Vec6 fd;
    fd.head<3>() = (a.position - b.position) / (2 * h);
    const Eigen::AngleAxisd aa(a.rotation * b.rotation.transpose());
    fd.tail<3>() = aa.angle() * aa.axis() / (2 * h);
    EXPECT_LT(rel_err(fd, model.jacobian(q) * dir), 1e-7);
  }
}

TEST_F(DefaultArm, VelocityRecursionMatchesJacobian) {
  for (int k = 0; k < 100; ++k) {
    const VecX q = test::uvecx(rng, n), qd = test::uvecx(rng, n);
    const ChainKinematics kin = model.forward_kinematics(q);
    const SpatialVelocity tip = model.velocity_recursion(kin, qd).tip.back();
    const Mat3& r = kin.end_effector().rotation;
    Vec6 ground;
    ground << r * tip.linear, r * tip.angular;
    EXPECT_LT(rel_err(ground, model.jacobian(kin) * qd), 1e-12);
  }
}

TEST_F(DefaultArm, RegressorIdentity) {
  for (int k = 0; k < 200; ++k) {
    const InertialParams phi = test::random_body(rng);
    const Vec6 v = test::uvec<6>(rng), vr = test::uvec<6>(rng), vrd = test::uvec<6>(rng);
    const Vec3 g = test::uvec<3>(rng, 10.0);
    const Vec6 direct =
        spatial_inertia(phi) * vrd + coriolis_matrix(phi, v) * vr + gravity_term(phi, g);
    EXPECT_LT(rel_err(rigid_body_regressor(v, vr, vrd, g) * phi.vector(), direct), 1e-9);
    EXPECT_LT(rel_err(inertia_regressor(vrd) * phi.vector(), spatial_inertia(phi) * vrd), 1e-12);
  }
}

TEST_F(DefaultArm, CoriolisIsSkewAndMatchesNewtonEuler) {
  for (int k = 0; k < 100; ++k) {
    const InertialParams phi = test::random_body(rng);
    const Vec6 v = test::uvec<6>(rng), vd = test::uvec<6>(rng);
    const Mat6 c = coriolis_matrix(phi, v);
    EXPECT_LT((c + c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    // Newton-Euler bias ad*_V M V.
    const Vec6 bias = force_cross(v) * spatial_inertia(phi) * v;
    EXPECT_LT(rel_err(c * v, bias), 1e-12);
    EXPECT_LT(rel_err(net_body_force(phi, v, vd, Vec3::Zero()), spatial_inertia(phi) * vd + bias), 1e-12);
  }
}

TEST_F(DefaultArm, JointInertiaIsSymmetricPositiveAndGivesKineticEnergy) {
  for (int k = 0; k < 20; ++k) {
    const VecX q = test::uvecx(rng, n), qd = test::uvecx(rng, n);
    const ChainKinematics kin = model.forward_kinematics(q);
    const MatX m = model.joint_inertia(kin);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatX>(m).eigenvalues().minCoeff(), 0.0);
    EXPECT_NEAR(model.kinetic_energy(kin, qd), 0.5 * qd.dot(m * qd), 1e-12);
  }
}

TEST_F(DefaultArm, InverseAndForwardDynamicsAgree) {
  for (int k = 0; k < 50; ++k) {
    const VecX q = test::uvecx(rng, n), qd = test::uvecx(rng, n), qdd = test::uvecx(rng, n);
    const ChainKinematics kin = model.forward_kinematics(q);
    const VecX tau = model.inverse_dynamics(kin, qd, qdd, SpatialForce::zero(FrameId::tip(n))).torque;
    EXPECT_LT(rel_err(model.forward_dynamics(q, qd, tau, Vec6::Zero()), qdd), 1e-9);
  }
}

// A force the arm exerts on its surroundings costs J^T f of torque; the same
// force applied to the arm is -f.
TEST_F(DefaultArm, TipLoadMapsThroughJacobianTranspose) {
  const VecX q = test::uvecx(rng, n), zero = VecX::Zero(n);
  const ChainKinematics kin = model.forward_kinematics(q);
  const Vec6 f = test::uvec<6>(rng, 5.0);
  const Mat3& r = kin.end_effector().rotation;
  const SpatialForce load{r.transpose() * f.head<3>(), r.transpose() * f.tail<3>(), FrameId::tip(n)};
  const VecX with = model.inverse_dynamics(kin, zero, zero, load).torque;
  const VecX without = model.inverse_dynamics(kin, zero, zero, SpatialForce::zero(FrameId::tip(n))).torque;
  EXPECT_LT(rel_err(with - without, model.jacobian(kin).transpose() * f), 1e-12);
  EXPECT_LT(model.forward_dynamics(q, zero, with, -f).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(DefaultArm, GravityCompensationHolds) {
  for (int k = 0; k < 20; ++k) {
    const VecX q = test::uvecx(rng, n), zero = VecX::Zero(n);
    const ChainKinematics kin = model.forward_kinematics(q);
    const VecX tau = model.inverse_dynamics(kin, zero, zero, SpatialForce::zero(FrameId::tip(n))).torque;
    EXPECT_LT(model.forward_dynamics(q, zero, tau, Vec6::Zero()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(TwoLink, MatchesLagrangian) {
  const test::TwoLink ref;
  const RobotModel model = ref.model();
  Rng rng(22);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2d q = test::uvec<2>(rng, 3.0), qd = test::uvec<2>(rng, 2.0),
                          qdd = test::uvec<2>(rng, 5.0);
    const ChainKinematics kin = model.forward_kinematics(q);
    const VecX tau = model.inverse_dynamics(kin, qd, qdd, SpatialForce::zero(FrameId::tip(2))).torque;
    EXPECT_LT(rel_err(tau, ref.torque(q, qd, qdd)), 1e-12);
    EXPECT_LT(rel_err(model.forward_dynamics(q, qd, ref.torque(q, qd, qdd), Vec6::Zero()), qdd), 1e-10);
    EXPECT_NEAR(model.kinetic_energy(kin, qd) + model.potential_energy(kin), ref.energy(q, qd), 1e-12);
  }
}

// Zero torque and zero gravity: kinetic energy is the total.
double energy_drift(const RobotModel& model, VecX q, VecX qd, double seconds, double dt) {
  const VecX tau = VecX::Zero(model.dof());
  const double e0 = model.kinetic_energy(model.forward_kinematics(q), qd);
  double worst = 0.0;
  for (long k = 0; k < std::lround(seconds / dt); ++k) {
    plant_step(model, q, qd, tau, Vec6::Zero(), dt);
    worst = std::max(worst, std::abs(model.kinetic_energy(model.forward_kinematics(q), qd) - e0));
  }
  return worst / e0;
}

TEST(TwoLink, FreeEnergyIsConserved) {
  test::TwoLink ref;
  ref.g = 0.0;
  VecX q(2), qd(2);
  q << 0.3, -0.7;
  qd << 1.0, -0.5;
  EXPECT_LT(energy_drift(ref.model(), q, qd, 10.0, 1e-4), 1e-3);
}

TEST(RobotModel, FreeEnergyIsConserved) {
  const RobotModel arm = RobotModel::default_arm();
  const RobotModel free(arm.links(), Vec3::Zero());
  VecX q(7), qd(7);
  q << 0.1, -0.5, 0.2, 1.3, -0.3, 0.6, 0.2;
  qd << 0.5, -0.4, 0.6, 0.3, -0.8, 0.7, 1.0;
  EXPECT_LT(energy_drift(free, q, qd, 10.0, 1e-4), 1e-3);
}

TEST(RobotModel, RejectsInconsistentLinks) {
  LinkDescription l;
  l.body = InertialParams(1.0, Vec3::Zero(), Mat3::Zero());  // singular pseudo-inertia
  l.motor_inertia = 0.01;
  l.actuator = rotor_params(JointAxis::Z, 0.01, 0.1);
  l.tip_offset = Vec3(0.1, 0, 0);
  EXPECT_THROW(RobotModel({l}, Vec3(0, 0, -9.81)), std::invalid_argument);
}

}  // namespace
}  // namespace vdc
