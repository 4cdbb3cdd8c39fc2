#include "vdc/interaction.hpp"
#include "vdc/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace vdc {
namespace {

// Underdamped second-order step response, unit amplitude.
double step_response(double wn, double zeta, double t) {
  const double wd = wn * std::sqrt(1 - zeta * zeta);
  return 1 - std::exp(-zeta * wn * t) * (std::cos(wd * t) + zeta / std::sqrt(1 - zeta * zeta) * std::sin(wd * t));
}

TEST(HumanArm, StepResponseMatchesClosedForm) {
  const HumanArmParams p;
  HumanArm arm(p, Vec6::Zero());
  const Vec6 x = Vec6::Constant(0.01);
  const double dt = 1e-4;
  double worst = 0.0;
  for (int k = 1; k <= 20000; ++k) {
    arm.step(x, dt);
    for (int i = 0; i < 6; ++i) {
      const double wn = std::sqrt(p.stiffness[i] / p.mass[i]);
      const double zeta = p.damping[i] / (2 * std::sqrt(p.stiffness[i] * p.mass[i]));
      worst = std::max(worst, std::abs(arm.position()[i] / 0.01 - step_response(wn, zeta, k * dt)));
    }
  }
  EXPECT_LT(worst, 0.01);
}

TEST(HumanArm, CouplingForce) {
  HumanArm arm(HumanArmParams{}, Vec6::Constant(0.02));
  const Vec6 f = arm.force(Vec6::Constant(0.01));
  EXPECT_DOUBLE_EQ(f[0], 1.5);
  EXPECT_DOUBLE_EQ(f[3], 0.015);
  HumanArmParams bad;
  bad.mass[0] = 0;
  EXPECT_THROW(HumanArm(bad, Vec6::Zero()), std::invalid_argument);
}

TEST(Wall, MassGate) {
  EXPECT_EQ(varying_mass_gate(1.0, 2.0, 0.14), 0.14);
  EXPECT_EQ(varying_mass_gate(-1.0, -2.0, 0.14), 0.14);
  EXPECT_EQ(varying_mass_gate(1.0, -2.0, 0.14), 0.0);
  EXPECT_EQ(varying_mass_gate(-1.0, 2.0, 0.14), 0.0);
  EXPECT_EQ(varying_mass_gate(0.0, 2.0, 0.14), 0.14);
}

TEST(Wall, ContactForce) {
  WallParams w;
  w.enabled = true;
  w.position = 0.07;
  w.stiffness = 1000;
  EXPECT_NEAR(contact_force(w, 0.071, 0, 0), 1.0, 1e-12);  // 1 mm into 1000 N/m
  EXPECT_EQ(contact_force(w, 0.069, 5, 5), 0.0);
  EXPECT_EQ(contact_force(w, 0.07, 5, 5), 0.0);

  w.element = WallElement::Damping;
  w.damping = 5;
  EXPECT_NEAR(contact_force(w, 0.071, 0.1, 0), 1.5, 1e-12);
  EXPECT_EQ(contact_force(w, 0.069, 0.1, 0), 0.0);

  w.element = WallElement::VaryingMass;
  w.mass = 0.14;
  EXPECT_NEAR(contact_force(w, 0.071, 0.1, 2.0), 1.0 + 0.28, 1e-12);
  EXPECT_NEAR(contact_force(w, 0.071, -0.1, 2.0), 1.0, 1e-12);

  w.enabled = false;
  EXPECT_EQ(contact_force(w, 0.08, 0, 0), 0.0);
}

TEST(Wall, ExternalForceComposition) {
  Vec6 fh;
  fh << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(compose_external_force(fh, 7, Vec3::UnitZ(), InteractionMode::Assist), Vec6(-fh));
  const Vec6 c = compose_external_force(fh, 7, Vec3::UnitZ(), InteractionMode::Contact);
  EXPECT_EQ(c[2], 4.0);
  EXPECT_EQ(c[0], -1.0);
}

TEST(Wall, EnergySteps) {
  EXPECT_NEAR(passivity_energy_step(0.0, 10.0, 0.01, 1.0), 0.1, 1e-12);
  EXPECT_NEAR(passivity_energy_step_trapezoid(0.0, 0.0, 0.2, 1.0), 0.1, 1e-12);
}

// Held-force work over a press and release of a pure spring.
TEST(Wall, SpringCycleIsNearlyLossless) {
  WallParams w;
  w.enabled = true;
  w.stiffness = 1000;
  WallMonitor mon(w, 1e-3, 50, EnergyRule::Held);
  double s_prev = -0.001;
  const double period = 2.0, depth = 0.005;
  for (int k = 1; k <= 2000; ++k) {
    mon.update(Vec3(0, 0, s_prev), Vec3::Zero());
    const double s = -0.001 + (depth + 0.001) * std::sin(std::numbers::pi * k * 1e-3 / period);
    mon.add_held_work(s - s_prev);
    s_prev = s;
  }
  EXPECT_LT(std::abs(mon.state().energy), 1e-4);
}

// Rendering a spring from samples held over the tick leaks energy while
// it is being compressed: the monitor must see a negative minimum.
TEST(Wall, HeldRuleSeesSampledSpringGeneratingEnergy) {
  WallParams w;
  w.enabled = true;
  w.stiffness = 20000;
  WallMonitor held(w, 1e-3, 50, EnergyRule::Held), sampled(w, 1e-3, 50, EnergyRule::Sampled);
  // Release from 5 mm at 0.2 m/s, one displacement per tick.
  double s = 0.005;
  const double v = -0.2;
  for (int k = 0; k < 25; ++k) {
    held.update(Vec3(0, 0, s), Vec3(0, 0, v));
    sampled.update(Vec3(0, 0, s), Vec3(0, 0, v));
    held.add_held_work(v * 1e-3);
    s += v * 1e-3;
  }
  EXPECT_LT(held.state().energy, 0.0);
  EXPECT_LT(held.state().min_energy, -1e-6);
}

TEST(Wall, MonitorRejectsBadParams) {
  WallParams w;
  w.stiffness = -1;
  EXPECT_THROW(WallMonitor(w, 1e-3, 50, EnergyRule::Held), std::invalid_argument);
  w.stiffness = 1;
  w.axis = Vec3(0, 0, 2);
  EXPECT_THROW(WallMonitor(w, 1e-3, 50, EnergyRule::Held), std::invalid_argument);
}

TEST(FilteredDerivative, RampSettlesToSlope) {
  FilteredDerivative<double> d(50, 1e-3);
  EXPECT_EQ(d.update(0.0), 0.0);
  for (int k = 1; k < 500; ++k) d.update(3.0 * k * 1e-3);
  EXPECT_NEAR(d.value(), 3.0, 1e-9);
}

TEST(Quintic, EndpointsAndPeaks) {
  const double tf = 5.0, d = 0.1;
  EXPECT_EQ(quintic(0, d, tf, 0).position, 0.0);
  EXPECT_NEAR(quintic(0, d, tf, tf).position, d, 1e-15);
  EXPECT_NEAR(quintic(0, d, tf, tf / 2).position, d / 2, 1e-15);
  EXPECT_NEAR(quintic(0, d, tf, tf / 2).velocity, 15.0 * d / (8.0 * tf), 1e-15);
  // Peak acceleration 10 sqrt(3) / 3 d / t_f^2 at s = 1/2 - sqrt(3)/6.
  const double s = 0.5 - std::sqrt(3.0) / 6.0;
  EXPECT_NEAR(quintic(0, d, tf, s * tf).acceleration, 10.0 * std::sqrt(3.0) / 3.0 * d / (tf * tf), 1e-14);
  EXPECT_EQ(quintic(0, d, tf, 2 * tf).velocity, 0.0);
  EXPECT_THROW(quintic(0, d, 0, 0), std::invalid_argument);
}

TEST(Quintic, VelocityIsDerivativeOfPosition) {
  const double tf = 2.0, h = 1e-6;
  for (double t = 0.1; t < tf; t += 0.1) {
    const double fd = (quintic(0, 1, tf, t + h).position - quintic(0, 1, tf, t - h).position) / (2 * h);
    EXPECT_NEAR(quintic(0, 1, tf, t).velocity, fd, 1e-8);
  }
}

TEST(SquarePath, VisitsCornersAndCloses) {
  SquarePathSpec sp;
  sp.start = Vec3(0.4, 0, 0.3);
  sp.segment_time = 2.0;
  EXPECT_LT((square_path(sp, 2.0).position - (sp.start + Vec3(0, 0, 0.1))).norm(), 1e-15);
  EXPECT_LT((square_path(sp, 4.0).position - (sp.start + Vec3(0, 0.1, 0.1))).norm(), 1e-15);
  EXPECT_LT((square_path(sp, 6.0).position - (sp.start + Vec3(0, 0.1, 0))).norm(), 1e-15);
  EXPECT_LT((square_path(sp, 8.0).position - sp.start).norm(), 1e-15);
  EXPECT_LT((square_path(sp, 20.0).position - sp.start).norm(), 1e-15);
  EXPECT_NEAR(square_path(sp, 1.0).velocity.z(), 15.0 * 0.1 / 16.0, 1e-15);
}

}  // namespace
}  // namespace vdc
