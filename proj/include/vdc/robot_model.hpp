#pragma once

// Serial chain description and the recursions on it.
//
// Body i (1-based) carries two frames: {B_i} at joint i and {T_i} at its
// distal cut. {B_i} is {T_{i-1}} rotated by q_i about the joint axis, with no
// offset; {T_i} is a fixed transform of {B_i}. {T_0} is the ground.
// Containers below are 0-based: element k belongs to body k+1.

#include "vdc/nal.hpp"
#include "vdc/spatial.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace vdc {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Mat6x10 = Eigen::Matrix<double, 6, 10>;
using Row10 = Eigen::Matrix<double, 1, 10>;

enum class JointAxis { X, Y, Z };

Vec3 axis_vector(JointAxis a);
/// 6D selector kappa: the angular unit entry for the joint axis.
Vec6 kappa(JointAxis a);
/// vecI slot of the rotational inertia about the axis (4, 5 or 6).
int axis_inertia_index(JointAxis a);

/// True inertial parameters of a rotor spinning about `axis` with reflected
/// inertia `motor_inertia`. Transverse inertias are 0.6x so the pseudo-inertia
/// stays positive definite.
InertialParams rotor_params(JointAxis axis, double motor_inertia, double rotor_mass);

struct LinkDescription {
  std::string name;
  JointAxis axis = JointAxis::Z;
  Mat3 tip_rotation = Mat3::Identity();  // ^{B_i}R_{T_i}
  Vec3 tip_offset = Vec3::Zero();        // ^{B_i}r_{B_i T_i}
  InertialParams body;                   // about {B_i}, in {B_i}
  double motor_inertia = 0.0;            // I_m, kg m^2
  InertialParams actuator;               // phi_a
  double q_min = -3.0;
  double q_max = 3.0;
};

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
};

/// Configuration-dependent frame data of the chain at one q.
struct ChainKinematics {
  std::vector<FrameTransform> joint;  // ^{T_{i-1}}T_{B_i}
  std::vector<Pose> body_world;       // {B_i} in ground
  std::vector<Pose> tip_world;        // {T_i} in ground
  Pose end_effector() const { return tip_world.back(); }
};

struct ChainVelocities {
  std::vector<SpatialVelocity> body;  // ^{B_i}V
  std::vector<SpatialVelocity> tip;   // ^{T_i}V
};

struct ChainForces {
  std::vector<SpatialForce> net;   // ^{B_i}F*
  std::vector<SpatialForce> body;  // ^{B_i}F
  std::vector<SpatialForce> tip;   // ^{T_i}F; tip.back() is the boundary force
  VecX torque;                     // tau_i = I_mi qdd_i + kappa_i^T ^{B_i}F
};

class RobotModel {
 public:
  RobotModel(std::vector<LinkDescription> links, const Vec3& gravity);

  /// Plausible 7-DoF arm used when no description file is given. Its
  /// dimensions are illustrative only.
  static RobotModel default_arm();

  int dof() const { return static_cast<int>(links_.size()); }
  const LinkDescription& link(int k) const { return links_[k]; }
  const std::vector<LinkDescription>& links() const { return links_; }
  const Vec3& gravity() const { return gravity_; }
  const FrameTransform& body_to_tip(int k) const { return body_to_tip_[k]; }
  VecX motor_inertias() const;

  ChainKinematics forward_kinematics(const VecX& q) const;

  /// Ground-frame Jacobian of the end-effector ({T_n} origin): Xdot = J qdot.
  Jacobian jacobian(const ChainKinematics& kin) const;
  Jacobian jacobian(const VecX& q) const { return jacobian(forward_kinematics(q)); }

  /// ^{B_i}V = kappa_i rate_i + ^{T_{i-1}}U_{B_i}^T ^{T_{i-1}}V with ground at rest.
  ChainVelocities velocity_recursion(const ChainKinematics& kin, const VecX& rates) const;

  /// Body-coordinate time derivatives of a velocity field propagated by
  /// velocity_recursion(kin, rates). `qd` is the actual joint rate that
  /// rotates the frames.
  ChainVelocities acceleration_recursion(const ChainKinematics& kin, const VecX& qd,
                                         const ChainVelocities& propagated,
                                         const VecX& rate_derivatives) const;

  /// Gravity acceleration expressed in {B_i}.
  Vec3 gravity_in_body(const ChainKinematics& kin, int k) const;

  /// Newton-Euler pass with true parameters. `tip_load` is the force the
  /// end-effector exerts on its surroundings, in {T_n}.
  ChainForces inverse_dynamics(const ChainKinematics& kin, const VecX& qd, const VecX& qdd,
                               const SpatialForce& tip_load, bool with_gravity = true) const;

  /// Joint-space inertia including rotor inertias, assembled column by column
  /// from unit-acceleration passes.
  MatX joint_inertia(const ChainKinematics& kin) const;

  /// Solves (M(q) + diag(I_m)) qdd = tau - bias(q, qd) + J^T f_ext where
  /// `f_ext` is the force applied to the end-effector, in ground axes.
  /// Throws NumericalFault if the inertia is not positive definite.
  VecX forward_dynamics(const VecX& q, const VecX& qd, const VecX& tau, const Vec6& f_ext) const;

  /// Kinetic energy (links and rotors) and potential energy.
  double kinetic_energy(const ChainKinematics& kin, const VecX& qd) const;
  double potential_energy(const ChainKinematics& kin) const;

 private:
  std::vector<LinkDescription> links_;
  std::vector<FrameTransform> body_to_tip_;
  Vec3 gravity_;
};

// ---- rigid-body dynamics terms -------------------------------------------

/// Spatial inertia [[m 1, -h x], [h x, I]] about the frame origin.
Mat6 spatial_inertia(const InertialParams& phi);

/// Motion cross product ad_V: ad_V x = V x x.
Mat6 motion_cross(const Vec6& v);
/// Force cross product ad*_V = -ad_V^T.
Mat6 force_cross(const Vec6& v);

/// Skew-symmetric Coriolis/centrifugal matrix with C(V) V equal to the
/// Newton-Euler bias: C = (ad*_V M + M ad_V + bar(M V)) / 2.
Mat6 coriolis_matrix(const InertialParams& phi, const Vec6& v);

/// Gravity term [-m g; -h x g] with g expressed in the body frame.
Vec6 gravity_term(const InertialParams& phi, const Vec3& g_body);

/// M Vdot + C(V) V + G evaluated with Newton-Euler products.
Vec6 net_body_force(const InertialParams& phi, const Vec6& v, const Vec6& vdot, const Vec3& g_body);

/// Y(x) with Y(x) phi = M(phi) x.
Mat6x10 inertia_regressor(const Vec6& x);

/// W with W phi = M Vr_dot + C(V) Vr + G for every phi.
Mat6x10 rigid_body_regressor(const Vec6& v, const Vec6& v_r, const Vec6& v_r_dot,
                             const Vec3& g_body);

/// W_a with W_a phi_a = I_m qdd_r.
Row10 actuator_regressor(JointAxis axis, double qdd_r);

}  // namespace vdc
