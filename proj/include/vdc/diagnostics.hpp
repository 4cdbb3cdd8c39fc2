#pragma once

// Numerical checks of the stability argument: virtual power flows, the
// accompanying function and its decrease, and the telescoping of the VPFs.

#include "vdc/controller.hpp"
#include "vdc/robot_model.hpp"

#include <vector>

namespace vdc {

/// (V_r - V)^T (F_r - F); all four in the same frame.
double vpf(const SpatialVelocity& v_r, const SpatialVelocity& v, const SpatialForce& f_r,
           const SpatialForce& f);

struct AccompanyingTerms {
  double body_integral = 0.0;
  double joint_integral = 0.0;
  double body_kinetic = 0.0;
  double joint_kinetic = 0.0;
  double body_bregman = 0.0;      // sum of D_F over bodies, unweighted
  double actuator_bregman = 0.0;  // sum of D_F over actuators, unweighted
  double gamma = 1.0;

  /// gamma on both divergence sums.
  double total() const {
    return body_integral + joint_integral + body_kinetic + joint_kinetic +
           gamma * (body_bregman + actuator_bregman);
  }
  /// gamma on the body divergences only, as printed.
  double total_literal() const {
    return body_integral + joint_integral + body_kinetic + joint_kinetic + gamma * body_bregman +
           actuator_bregman;
  }
};

/// Terms of the accompanying function for one controller snapshot. `state`
/// must be the controller state the tick started from (integrals and
/// estimates before the update); `rec` the tick's record.
AccompanyingTerms accompanying_function(const RobotModel& model, const ControllerGains& gains,
                                        const ControllerState& state, const TickRecord& rec);

/// sum(-e_V^T K_D e_V - k_d e_a^2) - p_tip.
double decrease_bound(const ControllerGains& gains, const TickRecord& rec, double p_tip);

struct LyapunovReport {
  int checked = 0;
  int bound_violations = 0;      // dnu/dt > bound + tol
  int increase_violations = 0;   // dnu/dt > tol
  int first_bound_violation = -1;
  int first_increase_violation = -1;
  double worst_excess = 0.0;     // max of dnu/dt - bound - tol
  double worst_increase = 0.0;   // max of dnu/dt - tol
  bool nonnegative = true;
};

/// Per-tick check over sampled nu and bound series at spacing dt, skipping
/// the first `transient` ticks. The bound of an interval is the trapezoid
/// average of its endpoints; tol = max(1e-6, 1e-3 |bound|).
LyapunovReport lyapunov_decrease_check(const std::vector<double>& nu, const std::vector<double>& bound,
                                       double dt, int transient);

struct TelescopingTerms {
  std::vector<double> p_body;  // p_{B_i}
  std::vector<double> p_tip;   // p_{T_i}
  double body_sum = 0.0;       // sum e_V^T (F_r* - F*)
  double joint_sum = 0.0;      // sum e_a (tau*_r - tau*)
  double p_end = 0.0;          // p_{T_n}
  double residual = 0.0;       // body_sum + joint_sum + p_end
  double scale = 0.0;          // sum of magnitudes of the summands
  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// Actual subsystem forces of the plant at one instant: F* = M Vdot + C V + G
/// per body with true parameters, F from the Newton-Euler pass with the
/// physical end-effector load, tau* = I_m qdd.
struct PlantForces {
  ChainForces forces;
  VecX tau_star;
};
PlantForces plant_forces(const RobotModel& model, const ChainKinematics& kin, const VecX& qd,
                         const VecX& qdd, const Vec6& tip_load_ground);

TelescopingTerms telescoping_check(const RobotModel& model, const TickRecord& rec,
                                   const PlantForces& plant);

/// Tip VPF (Xd_r - Xd)^T (f_d - f) with f_d - f built from the desired
/// impedance relation plus an optional violation `delta_f`.
double tip_vpf_identity(const ImpedanceTarget& target, const Vec6& pose_err, const Vec6& xd,
                        const Vec6& delta_f = Vec6::Zero());

}  // namespace vdc
