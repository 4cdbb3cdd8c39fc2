#include "support.hpp"
#include "vdc/controller.hpp"
#include "vdc/simulation.hpp"

#include <gtest/gtest.h>

#include <Eigen/QR>

namespace vdc {
namespace {

using test::Rng;

TEST(Impedance, DefaultGains) {
  const ImpedanceGains g = ImpedanceGains::from(ImpedanceTarget{});
  for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(g.gamma_f[i], 0.025);
  EXPECT_DOUBLE_EQ(g.gamma_x[0], 5.0);
  EXPECT_DOUBLE_EQ(g.gamma_x[2], 2.5);
  EXPECT_DOUBLE_EQ(g.gamma_x[5], 2.5);
}

// If the arm tracks the design variable exactly, the closed loop obeys
// B_d (Xd_d - Xd) + K_d e = f - f_d.
TEST(Impedance, TrackingTheDesignVariableRecoversTheImpedance) {
  Rng rng(31);
  for (int k = 0; k < 1000; ++k) {
    ImpedanceTarget t;
    t.damping = (test::uvec<6>(rng).array().abs() * 50 + 1).matrix();
    t.stiffness = (test::uvec<6>(rng).array().abs() * 300).matrix();
    t.velocity = test::uvec<6>(rng);
    t.force = test::uvec<6>(rng, 5.0);
    const Vec6 e = test::uvec<6>(rng, 0.1), f = test::uvec<6>(rng, 10.0);
    const Vec6 xd = impedance_design_variable(t, e, f);
    const Vec6 residual = t.damping.cwiseProduct(t.velocity - xd) + t.stiffness.cwiseProduct(e) - (f - t.force);
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff()));
  }
}

TEST(Impedance, PoseErrorSigns) {
  const Vec6 e = pose_error(Vec3(1, 2, 3), UnitQuaternion(), Vec3(0.5, 2, 4), UnitQuaternion());
  EXPECT_DOUBLE_EQ(e[0], 0.5);
  EXPECT_DOUBLE_EQ(e[2], -1.0);
  EXPECT_EQ(e.tail<3>().norm(), 0.0);
}

TEST(Pseudoinverse, MatchesMinimumNormSolution) {
  const RobotModel model = RobotModel::default_arm();
  Rng rng(32);
  for (int k = 0; k < 100; ++k) {
    const Jacobian j = model.jacobian(test::uvecx(rng, 7));
    const Vec6 x = test::uvec<6>(rng);
    const JointMapping m = task_to_joint(j, x, 1e-4, 1e-3);
    ASSERT_FALSE(m.damped);
    const VecX ref = MatX(j).completeOrthogonalDecomposition().pseudoInverse() * x;
    EXPECT_LT(test::rel_err(m.qd_r, ref), 1e-9);
    EXPECT_LT(test::rel_err(j * m.qd_r, x), 1e-10);
  }
}

TEST(Pseudoinverse, DampedBranchOnSingularJacobian) {
  Jacobian j = Jacobian::Zero(6, 7);
  for (int i = 0; i < 5; ++i) j(i, i) = 1.0;  // rank 5
  const Vec6 x = Vec6::Ones();
  const double lambda = 1e-2;
  const JointMapping m = task_to_joint(j, x, 1e-4, lambda);
  EXPECT_TRUE(m.damped);
  EXPECT_EQ(m.sigma_min, 0.0);
  const MatX jt = j.transpose();
  const VecX ref = (jt * j + lambda * lambda * MatX::Identity(7, 7)).ldlt().solve(jt * x);
  EXPECT_LT(test::rel_err(m.qd_r, ref), 1e-12);
  EXPECT_TRUE(m.qd_r.allFinite());
}

std::vector<InertialParams> true_bodies(const RobotModel& m) {
  std::vector<InertialParams> out;
  for (const auto& l : m.links()) out.push_back(l.body);
  return out;
}

std::vector<InertialParams> true_actuators(const RobotModel& m) {
  std::vector<InertialParams> out;
  for (const auto& l : m.links()) out.push_back(l.actuator);
  return out;
}

// At rest on target with exact estimates, the commanded torque is the
// gravity load plus the desired contact force.
TEST(Controller, StaticTorqueWithExactEstimates) {
  const RobotModel model = RobotModel::default_arm();
  const int n = model.dof();
  Rng rng(33);
  const VecX q = test::uvecx(rng, n), zero = VecX::Zero(n);
  const ChainKinematics kin = model.forward_kinematics(q);
  VdcController ctrl(model, ControllerGains{}, 1e-3, true_bodies(model), true_actuators(model));

  ImpedanceTarget t;
  t.position = kin.end_effector().position;
  t.orientation = UnitQuaternion::from_rotation(kin.end_effector().rotation);
  t.force << 1.0, -2.0, 3.0, 0.1, 0.2, -0.1;
  const TickRecord& rec = ctrl.tick(q, zero, t, t.force);

  const Mat3& r = kin.end_effector().rotation;
  const SpatialForce load{r.transpose() * t.force.head<3>(), r.transpose() * t.force.tail<3>(), FrameId::tip(n)};
  const VecX expected = model.inverse_dynamics(kin, zero, zero, load).torque;
  EXPECT_LT(test::rel_err(rec.tau, expected), 1e-9);
  EXPECT_LT(rec.xd_r.norm(), 1e-12);
}

TEST(Controller, RejectsBadEstimatesAndInputs) {
  const RobotModel model = RobotModel::default_arm();
  auto bodies = true_bodies(model);
  EXPECT_THROW(VdcController(model, ControllerGains{}, 1e-3, {}, true_actuators(model)), std::invalid_argument);
  bodies[2] = InertialParams(Vec10::Zero());
  EXPECT_THROW(VdcController(model, ControllerGains{}, 1e-3, bodies, true_actuators(model)), std::invalid_argument);

  VdcController ctrl(model, ControllerGains{}, 1e-3, true_bodies(model), true_actuators(model));
  VecX q = VecX::Zero(7);
  q[3] = std::nan("");
  EXPECT_ANY_THROW(ctrl.tick(q, VecX::Zero(7), ImpedanceTarget{}, Vec6::Zero()));
}

// Adaptation is only bounded in closed loop, so check it on a short run with
// a 30% initial estimate error.
TEST(Controller, AdaptationKeepsEstimatesConsistent) {
  Scenario s = preset("fig6");
  s.model = std::make_shared<const RobotModel>(RobotModel::default_arm());
  s.duration = 3.0;
  s.record = false;
  s.diagnostics = false;
  const RunLog log = run_scenario(s);
  ASSERT_TRUE(log.summary.completed) << log.summary.failure;
  EXPECT_GT(log.summary.min_l_eig, 0.0);
}

}  // namespace
}  // namespace vdc
