#pragma once

// Virtual decomposition control with natural adaptation, driven by the
// impedance design variable of the end-effector.

#include "vdc/interaction.hpp"
#include "vdc/nal.hpp"
#include "vdc/robot_model.hpp"

#include <vector>

namespace vdc {

struct ImpedanceTarget {
  Diag6 damping = Diag6::Constant(40.0);                                          // B_d
  Diag6 stiffness = (Diag6() << 200, 200, 100, 100, 100, 100).finished();        // K_d
  Vec3 position = Vec3::Zero();
  UnitQuaternion orientation;
  Vec6 velocity = Vec6::Zero();     // Xd_d, ground axes
  Vec6 force = Vec6::Zero();        // f_d, robot on environment
};

struct ControllerGains {
  Diag6 body_damping = Diag6::Constant(0.5);   // K_D
  Diag6 body_integral = Diag6::Constant(7.0);  // K_I
  double joint_damping = 0.05;                 // k_d
  double joint_integral = 7.0;                 // k_I
  double gamma = 10.0;
  double integral_clamp = 50.0;
  double qddr_cutoff_hz = 50.0;
  double singular_threshold = 1e-4;
  double dls_lambda = 1e-3;
  bool adapt = true;
  // Joint-space regulation gain for the calibration phase: qd_r = k_q (q* - q).
  double regulation_gain = 2.0;
};

/// Gamma_f = B_d^-1, Gamma_x = K_d B_d^-1.
struct ImpedanceGains {
  Diag6 gamma_x;
  Diag6 gamma_f;
  static ImpedanceGains from(const ImpedanceTarget& t) {
    return {t.stiffness.cwiseQuotient(t.damping), t.damping.cwiseInverse()};
  }
};

/// Pose error [p_d - p; quaternion error], ground axes.
Vec6 pose_error(const Vec3& p_d, const UnitQuaternion& o_d, const Vec3& p, const UnitQuaternion& o);

/// Xd_r = Xd_d + Gamma_x e + Gamma_f (f_d - f).
Vec6 impedance_design_variable(const ImpedanceTarget& target, const Vec6& pose_err, const Vec6& f);

struct JointMapping {
  VecX qd_r;
  double sigma_min = 0.0;
  bool damped = false;
};

/// Minimum-norm J^T (J J^T)^-1 Xd_r, falling back to damped least squares
/// when the smallest singular value of J drops below `threshold`.
JointMapping task_to_joint(const Jacobian& j, const Vec6& xd_r, double threshold, double lambda);

/// Everything one tick computes, kept for logging and diagnostics.
struct TickRecord {
  Vec6 pose_error = Vec6::Zero();
  Vec6 xd_r = Vec6::Zero();
  VecX qd_r, qdd_r, e_a, tau, tau_star_r;
  double sigma_min = 0.0;
  bool damped = false;
  ChainVelocities v, v_r, vdot_r;
  std::vector<Vec6> e_v;                 // ^{B_i}e_V = V_r - V
  std::vector<SpatialForce> f_r_star;    // ^{B_i}F_r*
  std::vector<SpatialForce> f_r_body;    // ^{B_i}F_r
  std::vector<SpatialForce> f_r_tip;     // ^{T_i}F_r
  std::vector<Mat6x10> w_body;
  std::vector<Row10> w_act;
};

struct ControllerState {
  std::vector<Vec6> body_integral;  // int e_V dt
  VecX joint_integral;              // int e_a dt
  AdaptationState adaptation;
  FilteredDerivative<VecX> qdd_r;
  int halvings = 0;                 // NAL step halvings so far
};

class VdcController {
 public:
  VdcController(const RobotModel& model, const ControllerGains& gains, double dt,
                std::vector<InertialParams> body_estimates,
                std::vector<InertialParams> actuator_estimates);

  /// Cartesian impedance tick; `f` is the measured force the end-effector
  /// exerts on its surroundings, ground axes.
  const TickRecord& tick(const VecX& q, const VecX& qd, const ImpedanceTarget& target, const Vec6& f);

  /// Joint regulation tick used to calibrate the start configuration.
  const TickRecord& regulate(const VecX& q, const VecX& qd, const VecX& q_target);

  /// Clears the integrators and the qdd_r filter; keeps the estimates.
  void reset_loop_state();
  /// Restarts the qdd_r differentiator, e.g. when the law producing qd_r changes.
  void restart_differentiator() { state_.qdd_r.reset(); }

  const ControllerState& state() const { return state_; }
  ControllerState& mutable_state() { return state_; }
  const ControllerGains& gains() const { return gains_; }
  /// Swaps the gains in place; diagnostics keep using the scenario's gains.
  void set_gains(const ControllerGains& g) { gains_ = g; }
  const RobotModel& model() const { return model_; }
  double dt() const { return dt_; }

 private:
  const TickRecord& finish(const ChainKinematics& kin, const VecX& qd, const VecX& qd_r,
                           const Vec6& f_d_tip_ground);

  const RobotModel& model_;
  ControllerGains gains_;
  double dt_;
  ControllerState state_;
  TickRecord rec_;
};

}  // namespace vdc
