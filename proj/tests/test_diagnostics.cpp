#include "support.hpp"
#include "vdc/diagnostics.hpp"
#include "vdc/simulation.hpp"

#include <gtest/gtest.h>

namespace vdc {
namespace {

using test::Rng;

TEST(Vpf, Definition) {
  const auto vr = SpatialVelocity::from_stacked(Vec6::Constant(2.0), FrameId::body(1));
  const auto v = SpatialVelocity::from_stacked(Vec6::Constant(1.0), FrameId::body(1));
  const auto fr = SpatialForce::from_stacked(Vec6::Constant(3.0), FrameId::body(1));
  const auto f = SpatialForce::from_stacked(Vec6::Constant(1.0), FrameId::body(1));
  EXPECT_DOUBLE_EQ(vpf(vr, v, fr, f), 12.0);
  EXPECT_THROW(vpf(vr, v, fr, SpatialForce::zero(FrameId::tip(1))), FrameMismatch);
}

TEST(TipVpf, VanishesUnderTheImpedanceRelation) {
  Rng rng(41);
  for (int k = 0; k < 500; ++k) {
    ImpedanceTarget t;
    t.velocity = test::uvec<6>(rng);
    t.force = test::uvec<6>(rng, 5.0);
    EXPECT_LT(std::abs(tip_vpf_identity(t, test::uvec<6>(rng, 0.1), test::uvec<6>(rng))), 1e-12);
  }
}

// With a violation d of the relation, Xd_r - Xd = B_d^-1 d.
TEST(TipVpf, ViolationShowsUp) {
  ImpedanceTarget t;
  Vec6 d = Vec6::Zero();
  d[0] = 4.0;
  const double p = tip_vpf_identity(t, Vec6::Zero(), Vec6::Zero(), d);
  EXPECT_NEAR(p, 4.0 / 40.0 * 4.0, 1e-12);
}

TEST(Lyapunov, CheckFlagsIncreaseAfterTransient) {
  const double dt = 1e-3;
  std::vector<double> nu, bound;
  for (int k = 0; k < 100; ++k) {
    nu.push_back(1.0 - k * dt);  // rate -1
    bound.push_back(-1.0);
  }
  LyapunovReport ok = lyapunov_decrease_check(nu, bound, dt, 10);
  EXPECT_EQ(ok.increase_violations, 0);
  EXPECT_EQ(ok.bound_violations, 0);
  EXPECT_EQ(ok.checked, 89);

  nu[50] += 0.01;
  LyapunovReport bad = lyapunov_decrease_check(nu, bound, dt, 10);
  EXPECT_GT(bad.increase_violations, 0);
  EXPECT_EQ(bad.first_increase_violation, 49);  // interval 49 -> 50

  // A jump inside the transient is ignored.
  nu[50] -= 0.01;
  nu[3] += 0.5;
  EXPECT_EQ(lyapunov_decrease_check(nu, bound, dt, 10).increase_violations, 0);
}

std::vector<InertialParams> perturbed(const std::vector<InertialParams>& in, Rng& rng, double rel) {
  std::vector<InertialParams> out;
  for (const auto& p : in) {
    const double s = 1.0 + rel * test::uni(rng);
    out.emplace_back(Vec10(s * p.vector()));
  }
  return out;
}

// The cancellation must hold with arbitrary estimates and loads as long as
// the plant is driven by the controller's torque and the stated load.
TEST(Telescoping, HoldsForAppliedTorqueAndBreaksOtherwise) {
  const RobotModel model = RobotModel::default_arm();
  const int n = model.dof();
  Rng rng(42);
  std::vector<InertialParams> bodies, acts;
  for (const auto& l : model.links()) {
    bodies.push_back(l.body);
    acts.push_back(l.actuator);
  }
  for (int k = 0; k < 50; ++k) {
    VdcController ctrl(model, ControllerGains{}, 1e-3, perturbed(bodies, rng, 0.3), perturbed(acts, rng, 0.3));
    const VecX q = test::uvecx(rng, n), qd = test::uvecx(rng, n, 0.5);
    const ChainKinematics kin = model.forward_kinematics(q);
    ImpedanceTarget t;
    t.position = kin.end_effector().position + test::uvec<3>(rng, 0.02);
    t.force = test::uvec<6>(rng, 3.0);
    const Vec6 f = test::uvec<6>(rng, 5.0);
    // Two ticks so the filtered qdd_r is nonzero.
    ctrl.tick(q - 1e-3 * qd, qd, t, f);
    const TickRecord& rec = ctrl.tick(q, qd, t, f);
    const VecX qdd = model.forward_dynamics(q, qd, rec.tau, -f);
    const TelescopingTerms good = telescoping_check(model, rec, plant_forces(model, kin, qd, qdd, f));
    EXPECT_LT(good.relative(), 1e-9);

    // Same motion, wrong load: the end-effector VPF no longer cancels.
    const TelescopingTerms bad =
        telescoping_check(model, rec, plant_forces(model, kin, qd, qdd, f + Vec6::Constant(1.0)));
    EXPECT_GT(std::abs(bad.residual), 1e3 * std::abs(good.residual) + 1e-9);
  }
}

}  // namespace
}  // namespace vdc
