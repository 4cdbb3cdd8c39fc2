#pragma once

// Test-side helpers. Nothing here calls into the code under test except to
// build inputs; the closed forms are written out from first principles.

#include "vdc/robot_model.hpp"

#include <cmath>
#include <random>

namespace vdc::test {

using Rng = std::mt19937_64;

inline double uni(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <int N>
Eigen::Matrix<double, N, 1> uvec(Rng& rng, double scale = 1.0) {
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = uni(rng, -scale, scale);
  return v;
}

inline VecX uvecx(Rng& rng, int n, double scale = 1.0) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = uni(rng, -scale, scale);
  return v;
}

inline Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q(uni(rng), uni(rng), uni(rng), uni(rng));
  if (q.norm() < 1e-3) q = Eigen::Quaterniond::Identity();
  return q.normalized().toRotationMatrix();
}

// A rigid body built from point masses is physically consistent by
// construction.
inline InertialParams random_body(Rng& rng) {
  double m = 0.0;
  Vec3 h = Vec3::Zero();
  Mat3 second = Mat3::Zero();  // sum m r r^T
  for (int k = 0; k < 6; ++k) {
    const double mk = uni(rng, 0.05, 1.0);
    const Vec3 r = uvec<3>(rng, 0.3);
    m += mk;
    h += mk * r;
    second += mk * r * r.transpose();
  }
  return InertialParams(m, h, second.trace() * Mat3::Identity() - second);
}

inline double rel_err(const VecX& a, const VecX& b) {
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

// Planar two-link arm: both joints about z, links along local x, gravity
// along -y so it acts in the plane of motion. Set g = 0 for a free arm.
struct TwoLink {
  double m1 = 1.3, m2 = 0.8;
  double l1 = 0.45, l2 = 0.35;
  double c1 = 0.2, c2 = 0.15;       // centre-of-mass distances
  double i1 = 0.031, i2 = 0.012;    // about the centre of mass, z axis
  double r1 = 0.02, r2 = 0.01;      // reflected rotor inertias
  double g = 9.81;

  RobotModel model() const {
    auto link = [](double m, double l, double c, double izz, double rotor) {
      LinkDescription d;
      d.axis = JointAxis::Z;
      d.tip_offset = Vec3(l, 0, 0);
      // Transverse entries do not enter planar motion; keep them plausible.
      d.body = InertialParams::from_com(m, Vec3(c, 0, 0), Vec3(0.001, izz, izz).asDiagonal());
      d.motor_inertia = rotor;
      d.actuator = rotor_params(JointAxis::Z, rotor, 0.1);
      d.q_min = -10;
      d.q_max = 10;
      return d;
    };
    return RobotModel({link(m1, l1, c1, i1, r1), link(m2, l2, c2, i2, r2)}, Vec3(0, -g, 0));
  }

  // Lagrange's equations written out by hand.
  Eigen::Vector2d torque(const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                         const Eigen::Vector2d& qdd) const {
    const double cq2 = std::cos(q[1]), sq2 = std::sin(q[1]);
    const double a = i1 + i2 + m1 * c1 * c1 + m2 * (l1 * l1 + c2 * c2 + 2 * l1 * c2 * cq2);
    const double b = i2 + m2 * (c2 * c2 + l1 * c2 * cq2);
    const double d = i2 + m2 * c2 * c2;
    const double h = m2 * l1 * c2 * sq2;
    const double g1 = (m1 * c1 + m2 * l1) * g * std::cos(q[0]) + m2 * c2 * g * std::cos(q[0] + q[1]);
    const double g2 = m2 * c2 * g * std::cos(q[0] + q[1]);
    Eigen::Vector2d tau;
    tau[0] = (a + r1) * qdd[0] + b * qdd[1] - h * (2 * qd[0] * qd[1] + qd[1] * qd[1]) + g1;
    tau[1] = b * qdd[0] + (d + r2) * qdd[1] + h * qd[0] * qd[0] + g2;
    return tau;
  }

  double energy(const Eigen::Vector2d& q, const Eigen::Vector2d& qd) const {
    const double cq2 = std::cos(q[1]);
    const double a = i1 + i2 + m1 * c1 * c1 + m2 * (l1 * l1 + c2 * c2 + 2 * l1 * c2 * cq2);
    const double b = i2 + m2 * (c2 * c2 + l1 * c2 * cq2);
    const double d = i2 + m2 * c2 * c2;
    const double t = 0.5 * ((a + r1) * qd[0] * qd[0] + 2 * b * qd[0] * qd[1] + (d + r2) * qd[1] * qd[1]);
    const double v = (m1 * c1 + m2 * l1) * g * std::sin(q[0]) + m2 * c2 * g * std::sin(q[0] + q[1]);
    return t + v;
  }
};

}  // namespace vdc::test
