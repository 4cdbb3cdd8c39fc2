#include "vdc/robot_model.hpp"

#include "vdc/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace vdc {

Vec3 axis_vector(JointAxis a) {
  switch (a) {
    case JointAxis::X: return Vec3::UnitX();
    case JointAxis::Y: return Vec3::UnitY();
    case JointAxis::Z: return Vec3::UnitZ();
  }
  return Vec3::UnitZ();
}

Vec6 kappa(JointAxis a) {
  Vec6 k = Vec6::Zero();
  k.tail<3>() = axis_vector(a);
  return k;
}

int axis_inertia_index(JointAxis a) {
  switch (a) {
    case JointAxis::X: return 4;
    case JointAxis::Y: return 5;
    case JointAxis::Z: return 6;
  }
  return 6;
}

InertialParams rotor_params(JointAxis axis, double motor_inertia, double rotor_mass) {
  const Vec3 k = axis_vector(axis);
  const Mat3 inertia = 0.6 * motor_inertia * (Mat3::Identity() - k * k.transpose()) +
                       motor_inertia * k * k.transpose();
  return InertialParams(rotor_mass, Vec3::Zero(), inertia);
}

// ---- dynamics terms ---------------------------------------------------------

Mat6 spatial_inertia(const InertialParams& phi) {
  Mat6 m = Mat6::Zero();
  const Mat3 hx = skew(phi.first_moment());
  m.topLeftCorner<3, 3>() = phi.mass() * Mat3::Identity();
  m.topRightCorner<3, 3>() = -hx;
  m.bottomLeftCorner<3, 3>() = hx;
  m.bottomRightCorner<3, 3>() = phi.inertia();
  return m;
}

Mat6 motion_cross(const Vec6& v) {
  Mat6 x = Mat6::Zero();
  const Mat3 wx = skew(v.tail<3>());
  x.topLeftCorner<3, 3>() = wx;
  x.topRightCorner<3, 3>() = skew(v.head<3>());
  x.bottomRightCorner<3, 3>() = wx;
  return x;
}

Mat6 force_cross(const Vec6& v) {
  Mat6 x = Mat6::Zero();
  const Mat3 wx = skew(v.tail<3>());
  x.topLeftCorner<3, 3>() = wx;
  x.bottomLeftCorner<3, 3>() = skew(v.head<3>());
  x.bottomRightCorner<3, 3>() = wx;
  return x;
}

Mat6 coriolis_matrix(const InertialParams& phi, const Vec6& v) {
  const Mat6 m = spatial_inertia(phi);
  const Vec6 mv = m * v;
  // bar(F) V' = ad*_{V'} F, i.e. [[0, -f x], [-f x, -n x]].
  Mat6 bar = Mat6::Zero();
  const Mat3 fx = skew(mv.head<3>());
  bar.topRightCorner<3, 3>() = -fx;
  bar.bottomLeftCorner<3, 3>() = -fx;
  bar.bottomRightCorner<3, 3>() = -skew(mv.tail<3>());
  return 0.5 * (force_cross(v) * m + m * motion_cross(v) + bar);
}

Vec6 gravity_term(const InertialParams& phi, const Vec3& g_body) {
  Vec6 g;
  g << -phi.mass() * g_body, -phi.first_moment().cross(g_body);
  return g;
}

Vec6 net_body_force(const InertialParams& phi, const Vec6& v, const Vec6& vdot, const Vec3& g_body) {
  const double m = phi.mass();
  const Vec3 h = phi.first_moment();
  const Vec3 lin = v.head<3>();
  const Vec3 ang = v.tail<3>();
  const Vec3 lin_dot = vdot.head<3>();
  const Vec3 ang_dot = vdot.tail<3>();
  const Vec3 momentum = m * lin + ang.cross(h);
  const Vec3 angular_momentum = h.cross(lin) + phi.inertia() * ang;
  Vec6 f;
  f.head<3>() = m * lin_dot + ang_dot.cross(h) + ang.cross(momentum) - m * g_body;
  f.tail<3>() = h.cross(lin_dot) + phi.inertia() * ang_dot + ang.cross(angular_momentum) +
                lin.cross(momentum) - h.cross(g_body);
  return f;
}

Mat6x10 inertia_regressor(const Vec6& x) {
  const Vec3 v = x.head<3>();
  const Vec3 w = x.tail<3>();
  Mat6x10 y = Mat6x10::Zero();
  y.block<3, 1>(0, 0) = v;
  y.block<3, 3>(0, 1) = skew(w);
  y.block<3, 3>(3, 1) = -skew(v);
  // vecI = [Ixx, Iyy, Izz, Ixy, Iyz, Ixz]
  y(3, 4) = w.x();
  y(4, 5) = w.y();
  y(5, 6) = w.z();
  y(3, 7) = w.y(); y(4, 7) = w.x();
  y(4, 8) = w.z(); y(5, 8) = w.y();
  y(3, 9) = w.z(); y(5, 9) = w.x();
  return y;
}

Mat6x10 rigid_body_regressor(const Vec6& v, const Vec6& v_r, const Vec6& v_r_dot,
                             const Vec3& g_body) {
  Mat6x10 w = inertia_regressor(v_r_dot + 0.5 * motion_cross(v) * v_r);
  w.noalias() += 0.5 * force_cross(v) * inertia_regressor(v_r);
  w.noalias() += 0.5 * force_cross(v_r) * inertia_regressor(v);
  w.block<3, 1>(0, 0) -= g_body;
  w.block<3, 3>(3, 1) += skew(g_body);
  return w;
}

Row10 actuator_regressor(JointAxis axis, double qdd_r) {
  Row10 w = Row10::Zero();
  w[axis_inertia_index(axis)] = qdd_r;
  return w;
}

// ---- model ----------------------------------------------------------------

RobotModel::RobotModel(std::vector<LinkDescription> links, const Vec3& gravity)
    : links_(std::move(links)), gravity_(gravity) {
  if (links_.empty()) throw std::invalid_argument("RobotModel: chain has no links");
  body_to_tip_.reserve(links_.size());
  for (int k = 0; k < dof(); ++k) {
    const auto& l = links_[k];
    if (!(l.body.mass() > 0.0)) {
      throw std::invalid_argument("RobotModel: link '" + l.name + "' needs positive mass");
    }
    if (!nal_map(l.body).positive_definite()) {
      throw std::invalid_argument("RobotModel: link '" + l.name +
                                  "' inertial parameters are not physically consistent");
    }
    if (!(l.motor_inertia > 0.0) || !nal_map(l.actuator).positive_definite()) {
      throw std::invalid_argument("RobotModel: actuator of '" + l.name + "' is not physically consistent");
    }
    if (!(l.q_min < l.q_max)) throw std::invalid_argument("RobotModel: link '" + l.name + "' joint limits");
    body_to_tip_.emplace_back(l.tip_rotation, l.tip_offset, FrameId::body(k + 1), FrameId::tip(k + 1));
  }
}

RobotModel RobotModel::default_arm() {
  using std::numbers::pi;
  const Mat3 rx_m90 = Eigen::AngleAxisd(-pi / 2, Vec3::UnitX()).toRotationMatrix();
  const Mat3 rx_p90 = Eigen::AngleAxisd(pi / 2, Vec3::UnitX()).toRotationMatrix();
  const Mat3 rz_m90 = Eigen::AngleAxisd(-pi / 2, Vec3::UnitZ()).toRotationMatrix();

  struct Spec {
    const char* name;
    JointAxis axis;
    Mat3 rot;
    Vec3 offset;
    double mass;
    double radius;  // slender-cylinder radius for the inertia estimate
    double motor;
    double limit;
  };
  // Shoulder (1-3), elbow (4), wrist (5-7); joints 1-4 and 6 turn about local
  // z, joint 5 about x and joint 7 about y.
  const Spec specs[] = {
      {"shoulder_yaw", JointAxis::Z, rx_m90, Vec3(0, 0, 0.10), 1.0, 0.05, 0.30, 2.8},
      {"shoulder_pitch", JointAxis::Z, rx_p90, Vec3(0, -0.15, 0), 1.4, 0.04, 0.30, 2.0},
      {"upper_arm_roll", JointAxis::Z, rx_m90, Vec3(0, 0, 0.15), 1.2, 0.04, 0.15, 2.8},
      {"elbow", JointAxis::Z, rz_m90, Vec3(0, -0.12, 0), 0.9, 0.035, 0.15, 2.4},
      {"forearm_roll", JointAxis::X, Mat3::Identity(), Vec3(0.13, 0, 0), 0.7, 0.03, 0.05, 2.8},
      {"wrist_pitch", JointAxis::Z, rz_m90, Vec3(0.05, 0, 0), 0.5, 0.03, 0.03, 2.0},
      {"wrist_roll", JointAxis::Y, Mat3::Identity(), Vec3(0, 0.06, 0), 0.4, 0.03, 0.03, 2.8},
  };

  std::vector<LinkDescription> links;
  for (const auto& s : specs) {
    LinkDescription l;
    l.name = s.name;
    l.axis = s.axis;
    l.tip_rotation = s.rot;
    l.tip_offset = s.offset;
    // Slender cylinder between the two frame origins.
    const double len = s.offset.norm();
    const Vec3 dir = s.offset / len;
    const double i_axial = 0.5 * s.mass * s.radius * s.radius;
    const double i_trans = s.mass * (3 * s.radius * s.radius + len * len) / 12.0;
    const Mat3 i_com = i_trans * Mat3::Identity() + (i_axial - i_trans) * dir * dir.transpose();
    l.body = InertialParams::from_com(s.mass, 0.5 * s.offset, i_com);
    l.motor_inertia = s.motor;
    l.actuator = rotor_params(s.axis, s.motor, 0.2);
    l.q_min = -s.limit;
    l.q_max = s.limit;
    links.push_back(std::move(l));
  }
  return RobotModel(std::move(links), Vec3(0, 0, -9.81));
}

VecX RobotModel::motor_inertias() const {
  VecX im(dof());
  for (int k = 0; k < dof(); ++k) im[k] = links_[k].motor_inertia;
  return im;
}

ChainKinematics RobotModel::forward_kinematics(const VecX& q) const {
  const int n = dof();
  ChainKinematics kin;
  kin.joint.reserve(n);
  kin.body_world.resize(n);
  kin.tip_world.resize(n);
  Pose prev;  // ground
  for (int k = 0; k < n; ++k) {
    kin.joint.push_back(joint_rotation(axis_vector(links_[k].axis), q[k], FrameId::tip(k),
                                       FrameId::body(k + 1)));
    Pose& b = kin.body_world[k];
    b.rotation = prev.rotation * kin.joint[k].rotation();
    b.position = prev.position;
    Pose& t = kin.tip_world[k];
    t.rotation = b.rotation * body_to_tip_[k].rotation();
    t.position = b.position + b.rotation * body_to_tip_[k].offset();
    prev = t;
  }
  return kin;
}

Jacobian RobotModel::jacobian(const ChainKinematics& kin) const {
  const int n = dof();
  Jacobian j(6, n);
  const Vec3 p_ee = kin.tip_world.back().position;
  for (int k = 0; k < n; ++k) {
    const Vec3 a = kin.body_world[k].rotation * axis_vector(links_[k].axis);
    j.col(k).head<3>() = a.cross(p_ee - kin.body_world[k].position);
    j.col(k).tail<3>() = a;
  }
  return j;
}

ChainVelocities RobotModel::velocity_recursion(const ChainKinematics& kin, const VecX& rates) const {
  const int n = dof();
  ChainVelocities out;
  out.body.reserve(n);
  out.tip.reserve(n);
  SpatialVelocity prev = SpatialVelocity::zero(FrameId::ground());
  for (int k = 0; k < n; ++k) {
    SpatialVelocity b = transform_velocity(kin.joint[k], prev);
    b.angular += axis_vector(links_[k].axis) * rates[k];
    out.body.push_back(b);
    prev = transform_velocity(body_to_tip_[k], b);
    out.tip.push_back(prev);
  }
  return out;
}

ChainVelocities RobotModel::acceleration_recursion(const ChainKinematics& kin, const VecX& qd,
                                                   const ChainVelocities& propagated,
                                                   const VecX& rate_derivatives) const {
  const int n = dof();
  ChainVelocities out;
  out.body.reserve(n);
  out.tip.reserve(n);
  SpatialVelocity prev = SpatialVelocity::zero(FrameId::ground());
  for (int k = 0; k < n; ++k) {
    const Vec3 axis = axis_vector(links_[k].axis);
    SpatialVelocity b = transform_velocity(kin.joint[k], prev);
    if (k > 0) {
      // d/dt R^T = -(axis qd) x R^T for the joint rotation.
      const SpatialVelocity carried = transform_velocity(kin.joint[k], propagated.tip[k - 1]);
      const Vec3 w = axis * qd[k];
      b.linear -= w.cross(carried.linear);
      b.angular -= w.cross(carried.angular);
    }
    b.angular += axis * rate_derivatives[k];
    out.body.push_back(b);
    prev = transform_velocity(body_to_tip_[k], b);
    out.tip.push_back(prev);
  }
  return out;
}

Vec3 RobotModel::gravity_in_body(const ChainKinematics& kin, int k) const {
  return kin.body_world[k].rotation.transpose() * gravity_;
}

ChainForces RobotModel::inverse_dynamics(const ChainKinematics& kin, const VecX& qd,
                                         const VecX& qdd, const SpatialForce& tip_load,
                                         bool with_gravity) const {
  const int n = dof();
  const ChainVelocities vel = velocity_recursion(kin, qd);
  const ChainVelocities acc = acceleration_recursion(kin, qd, vel, qdd);
  ChainForces out;
  out.net.resize(n, SpatialForce::zero(FrameId::ground()));
  out.body.resize(n, SpatialForce::zero(FrameId::ground()));
  out.tip.resize(n, SpatialForce::zero(FrameId::ground()));
  out.torque.resize(n);
  if (!(tip_load.frame == FrameId::tip(n))) throw FrameMismatch(FrameId::tip(n), tip_load.frame, "inverse_dynamics");
  SpatialForce outward = tip_load;
  for (int k = n - 1; k >= 0; --k) {
    const Vec3 g = with_gravity ? gravity_in_body(kin, k) : Vec3::Zero();
    out.net[k] = SpatialForce::from_stacked(
        net_body_force(links_[k].body, vel.body[k].stacked(), acc.body[k].stacked(), g),
        FrameId::body(k + 1));
    out.tip[k] = outward;
    const SpatialForce carried = transform_force(body_to_tip_[k], outward);
    SpatialForce b = out.net[k];
    b.force += carried.force;
    b.moment += carried.moment;
    out.body[k] = b;
    out.torque[k] = links_[k].motor_inertia * qdd[k] + axis_vector(links_[k].axis).dot(b.moment);
    outward = transform_force(kin.joint[k], b);
  }
  return out;
}

MatX RobotModel::joint_inertia(const ChainKinematics& kin) const {
  const int n = dof();
  MatX m(n, n);
  const VecX zero = VecX::Zero(n);
  const SpatialForce no_load = SpatialForce::zero(FrameId::tip(n));
  for (int j = 0; j < n; ++j) {
    m.col(j) = inverse_dynamics(kin, zero, VecX::Unit(n, j), no_load, false).torque;
  }
  return 0.5 * (m + m.transpose());
}

VecX RobotModel::forward_dynamics(const VecX& q, const VecX& qd, const VecX& tau,
                                  const Vec6& f_ext) const {
  const int n = dof();
  const ChainKinematics kin = forward_kinematics(q);
  const VecX bias =
      inverse_dynamics(kin, qd, VecX::Zero(n), SpatialForce::zero(FrameId::tip(n))).torque;
  const MatX m = joint_inertia(kin);
  const VecX rhs = tau - bias + jacobian(kin).transpose() * f_ext;
  Eigen::LLT<MatX> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalFault("forward_dynamics: joint inertia is not positive definite");
  return llt.solve(rhs);
}

double RobotModel::kinetic_energy(const ChainKinematics& kin, const VecX& qd) const {
  const ChainVelocities vel = velocity_recursion(kin, qd);
  double e = 0.0;
  for (int k = 0; k < dof(); ++k) {
    const Vec6 v = vel.body[k].stacked();
    e += 0.5 * v.dot(spatial_inertia(links_[k].body) * v);
    e += 0.5 * links_[k].motor_inertia * qd[k] * qd[k];
  }
  return e;
}

double RobotModel::potential_energy(const ChainKinematics& kin) const {
  double e = 0.0;
  for (int k = 0; k < dof(); ++k) {
    const Pose& b = kin.body_world[k];
    const Vec3 weighted_com = links_[k].body.mass() * b.position + b.rotation * links_[k].body.first_moment();
    e -= gravity_.dot(weighted_com);
  }
  return e;
}

}  // namespace vdc
