#include "vdc/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace vdc {

double vpf(const SpatialVelocity& v_r, const SpatialVelocity& v, const SpatialForce& f_r,
           const SpatialForce& f) {
  if (!(v.frame == v_r.frame)) throw FrameMismatch(v_r.frame, v.frame, "vpf");
  if (!(f_r.frame == v_r.frame)) throw FrameMismatch(v_r.frame, f_r.frame, "vpf");
  if (!(f.frame == v_r.frame)) throw FrameMismatch(v_r.frame, f.frame, "vpf");
  return (v_r.stacked() - v.stacked()).dot(f_r.stacked() - f.stacked());
}

AccompanyingTerms accompanying_function(const RobotModel& model, const ControllerGains& gains,
                                        const ControllerState& state, const TickRecord& rec) {
  AccompanyingTerms t;
  t.gamma = state.adaptation.gamma;
  for (int k = 0; k < model.dof(); ++k) {
    const Vec6& ie = state.body_integral[k];
    t.body_integral += 0.5 * ie.dot(gains.body_integral.cwiseProduct(ie));
    t.joint_integral += 0.5 * gains.joint_integral * state.joint_integral[k] * state.joint_integral[k];
    t.body_kinetic += 0.5 * rec.e_v[k].dot(spatial_inertia(model.link(k).body) * rec.e_v[k]);
    t.joint_kinetic += 0.5 * model.link(k).motor_inertia * rec.e_a[k] * rec.e_a[k];
    t.body_bregman += bregman_divergence(nal_map(model.link(k).body), state.adaptation.bodies[k]);
    t.actuator_bregman += bregman_divergence(nal_map(model.link(k).actuator), state.adaptation.actuators[k]);
  }
  return t;
}

double decrease_bound(const ControllerGains& gains, const TickRecord& rec, double p_tip) {
  double b = -p_tip;
  for (std::size_t k = 0; k < rec.e_v.size(); ++k) {
    b -= rec.e_v[k].dot(gains.body_damping.cwiseProduct(rec.e_v[k]));
    b -= gains.joint_damping * rec.e_a[k] * rec.e_a[k];
  }
  return b;
}

LyapunovReport lyapunov_decrease_check(const std::vector<double>& nu, const std::vector<double>& bound,
                                       double dt, int transient) {
  LyapunovReport r;
  if (nu.size() != bound.size()) throw std::invalid_argument("lyapunov_decrease_check: series lengths differ");
  for (double v : nu) r.nonnegative = r.nonnegative && v >= 0.0;
  for (std::size_t k = std::max(transient, 0); k + 1 < nu.size(); ++k) {
    const double rate = (nu[k + 1] - nu[k]) / dt;
    const double b = 0.5 * (bound[k] + bound[k + 1]);
    const double tol = std::max(1e-6, 1e-3 * std::abs(b));
    ++r.checked;
    if (rate > b + tol) {
      if (r.bound_violations++ == 0) r.first_bound_violation = static_cast<int>(k);
      r.worst_excess = std::max(r.worst_excess, rate - b - tol);
    }
    if (rate > tol) {
      if (r.increase_violations++ == 0) r.first_increase_violation = static_cast<int>(k);
      r.worst_increase = std::max(r.worst_increase, rate - tol);
    }
  }
  return r;
}

PlantForces plant_forces(const RobotModel& model, const ChainKinematics& kin, const VecX& qd,
                         const VecX& qdd, const Vec6& tip_load_ground) {
  const int n = model.dof();
  const Mat3 r = kin.end_effector().rotation;
  const SpatialForce tip{r.transpose() * tip_load_ground.head<3>(), r.transpose() * tip_load_ground.tail<3>(),
                         FrameId::tip(n)};
  PlantForces p{model.inverse_dynamics(kin, qd, qdd, tip), model.motor_inertias().cwiseProduct(qdd)};
  return p;
}

TelescopingTerms telescoping_check(const RobotModel& model, const TickRecord& rec,
                                   const PlantForces& plant) {
  const int n = model.dof();
  TelescopingTerms t;
  t.p_body.resize(n);
  t.p_tip.resize(n);
  for (int k = 0; k < n; ++k) {
    const SpatialVelocity& vb = rec.v.body[k];
    const SpatialVelocity& vrb = rec.v_r.body[k];
    t.p_body[k] = vpf(vrb, vb, rec.f_r_body[k], plant.forces.body[k]);
    t.p_tip[k] = vpf(rec.v_r.tip[k], rec.v.tip[k], rec.f_r_tip[k], plant.forces.tip[k]);
    const double body_term = rec.e_v[k].dot(rec.f_r_star[k].stacked() - plant.forces.net[k].stacked());
    const double joint_term = rec.e_a[k] * (rec.tau_star_r[k] - plant.tau_star[k]);
    t.body_sum += body_term;
    t.joint_sum += joint_term;
    t.scale += std::abs(body_term) + std::abs(joint_term);
  }
  t.p_end = t.p_tip[n - 1];
  t.scale += std::abs(t.p_end);
  t.residual = t.body_sum + t.joint_sum + t.p_end;
  return t;
}

double tip_vpf_identity(const ImpedanceTarget& target, const Vec6& pose_err, const Vec6& xd,
                        const Vec6& delta_f) {
  const Vec6 force_err = -target.damping.cwiseProduct(target.velocity - xd) -
                         target.stiffness.cwiseProduct(pose_err) + delta_f;
  ImpedanceTarget t = target;
  // impedance_design_variable takes f, so express f_d - f through f.
  const Vec6 f = t.force - force_err;
  const Vec6 xd_r = impedance_design_variable(t, pose_err, f);
  return (xd_r - xd).dot(force_err);
}

}  // namespace vdc
