#include "vdc/controller.hpp"

#include "vdc/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace vdc {

Vec6 pose_error(const Vec3& p_d, const UnitQuaternion& o_d, const Vec3& p, const UnitQuaternion& o) {
  Vec6 e;
  e << p_d - p, quaternion_error(o_d, o);
  return e;
}

Vec6 impedance_design_variable(const ImpedanceTarget& target, const Vec6& pose_err, const Vec6& f) {
  const ImpedanceGains g = ImpedanceGains::from(target);
  return target.velocity + g.gamma_x.cwiseProduct(pose_err) + g.gamma_f.cwiseProduct(target.force - f);
}

JointMapping task_to_joint(const Jacobian& j, const Vec6& xd_r, double threshold, double lambda) {
  JointMapping out;
  Eigen::JacobiSVD<MatX> svd(j);
  out.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  Mat6 jjt = j * j.transpose();
  if (out.sigma_min < threshold) {
    jjt += lambda * lambda * Mat6::Identity();
    out.damped = true;
  }
  out.qd_r = j.transpose() * jjt.ldlt().solve(xd_r);
  return out;
}

VdcController::VdcController(const RobotModel& model, const ControllerGains& gains, double dt,
                             std::vector<InertialParams> body_estimates,
                             std::vector<InertialParams> actuator_estimates)
    : model_(model), gains_(gains), dt_(dt) {
  const int n = model.dof();
  if (static_cast<int>(body_estimates.size()) != n || static_cast<int>(actuator_estimates.size()) != n) {
    throw std::invalid_argument("VdcController: one estimate per body and per actuator is required");
  }
  if (!(dt > 0.0) || !(gains.gamma > 0.0)) throw std::invalid_argument("VdcController: dt and gamma must be positive");
  state_.adaptation.gamma = gains.gamma;
  for (int k = 0; k < n; ++k) {
    LMatrix lb = nal_map(body_estimates[k]);
    LMatrix la = nal_map(actuator_estimates[k]);
    if (!lb.positive_definite(kPdFloor) || !la.positive_definite(kPdFloor)) {
      throw std::invalid_argument("VdcController: initial estimates must be physically consistent");
    }
    state_.adaptation.bodies.push_back(lb);
    state_.adaptation.actuators.push_back(la);
  }
  reset_loop_state();
}

void VdcController::reset_loop_state() {
  const int n = model_.dof();
  state_.body_integral.assign(n, Vec6::Zero());
  state_.joint_integral = VecX::Zero(n);
  state_.qdd_r.configure(gains_.qddr_cutoff_hz, dt_);
}

const TickRecord& VdcController::tick(const VecX& q, const VecX& qd, const ImpedanceTarget& target,
                                      const Vec6& f) {
  if (!q.allFinite() || !qd.allFinite() || !f.allFinite()) {
    throw NumericalFault("controller: non-finite measurement");
  }
  const ChainKinematics kin = model_.forward_kinematics(q);
  const Pose ee = kin.end_effector();
  rec_.pose_error = pose_error(target.position, target.orientation, ee.position,
                               UnitQuaternion::from_rotation(ee.rotation));
  rec_.xd_r = impedance_design_variable(target, rec_.pose_error, f);
  const JointMapping m = task_to_joint(model_.jacobian(kin), rec_.xd_r, gains_.singular_threshold,
                                       gains_.dls_lambda);
  rec_.sigma_min = m.sigma_min;
  rec_.damped = m.damped;
  return finish(kin, qd, m.qd_r, target.force);
}

const TickRecord& VdcController::regulate(const VecX& q, const VecX& qd, const VecX& q_target) {
  if (!q.allFinite() || !qd.allFinite()) throw NumericalFault("controller: non-finite measurement");
  const ChainKinematics kin = model_.forward_kinematics(q);
  rec_.pose_error.setZero();
  rec_.xd_r.setZero();
  rec_.sigma_min = 0.0;
  rec_.damped = false;
  return finish(kin, qd, gains_.regulation_gain * (q_target - q), Vec6::Zero());
}

const TickRecord& VdcController::finish(const ChainKinematics& kin, const VecX& qd, const VecX& qd_r,
                                        const Vec6& f_d) {
  const int n = model_.dof();
  rec_.qd_r = qd_r;
  rec_.qdd_r = state_.qdd_r.update(qd_r);
  rec_.e_a = qd_r - qd;

  rec_.v = model_.velocity_recursion(kin, qd);
  rec_.v_r = model_.velocity_recursion(kin, qd_r);
  rec_.vdot_r = model_.acceleration_recursion(kin, qd, rec_.v_r, rec_.qdd_r);

  rec_.e_v.resize(n);
  rec_.f_r_star.assign(n, SpatialForce::zero(FrameId::ground()));
  rec_.f_r_body.assign(n, SpatialForce::zero(FrameId::ground()));
  rec_.f_r_tip.assign(n, SpatialForce::zero(FrameId::ground()));
  rec_.w_body.resize(n);
  rec_.w_act.resize(n);
  rec_.tau.resize(n);
  rec_.tau_star_r.resize(n);

  // Required force at the end-effector cut: f_d rotated into {T_n}.
  const Mat3 r_ee = kin.end_effector().rotation;
  SpatialForce outward{r_ee.transpose() * f_d.head<3>(), r_ee.transpose() * f_d.tail<3>(), FrameId::tip(n)};

  auto& ad = state_.adaptation;
  for (int k = n - 1; k >= 0; --k) {
    const Vec6 v = rec_.v.body[k].stacked();
    const Vec6 v_r = rec_.v_r.body[k].stacked();
    rec_.e_v[k] = v_r - v;
    rec_.w_body[k] = rigid_body_regressor(v, v_r, rec_.vdot_r.body[k].stacked(), model_.gravity_in_body(kin, k));
    const Vec10 phi_hat = nal_unmap(ad.bodies[k]).vector();
    const Vec6 f_star = rec_.w_body[k] * phi_hat + gains_.body_damping.cwiseProduct(rec_.e_v[k]) +
                        gains_.body_integral.cwiseProduct(state_.body_integral[k]);
    rec_.f_r_star[k] = SpatialForce::from_stacked(f_star, FrameId::body(k + 1));
    rec_.f_r_tip[k] = outward;
    const SpatialForce carried = transform_force(model_.body_to_tip(k), outward);
    SpatialForce fb = rec_.f_r_star[k];
    fb.force += carried.force;
    fb.moment += carried.moment;
    rec_.f_r_body[k] = fb;
    outward = transform_force(kin.joint[k], fb);

    const JointAxis axis = model_.link(k).axis;
    rec_.w_act[k] = actuator_regressor(axis, rec_.qdd_r[k]);
    const double tau_star = rec_.w_act[k].dot(nal_unmap(ad.actuators[k]).vector()) +
                            gains_.joint_damping * rec_.e_a[k] +
                            gains_.joint_integral * state_.joint_integral[k];
    rec_.tau_star_r[k] = tau_star;
    rec_.tau[k] = tau_star + axis_vector(axis).dot(fb.moment);
  }

  if (gains_.adapt) {
    for (int k = 0; k < n; ++k) {
      const Mat4 s_b = dual_s_matrix<6>(rec_.w_body[k], rec_.e_v[k]);
      const NalStep nb = nal_update(ad.bodies[k], s_b, ad.gamma, dt_);
      const Mat4 s_a = dual_s_matrix(Vec10(rec_.w_act[k].transpose() * rec_.e_a[k]));
      const NalStep na = nal_update(ad.actuators[k], s_a, ad.gamma, dt_);
      ad.bodies[k] = nb.next;
      ad.actuators[k] = na.next;
      state_.halvings += nb.halvings + na.halvings;
    }
  }
  const double c = gains_.integral_clamp;
  for (int k = 0; k < n; ++k) {
    state_.body_integral[k] = (state_.body_integral[k] + dt_ * rec_.e_v[k]).cwiseMax(-c).cwiseMin(c);
    state_.joint_integral[k] = std::clamp(state_.joint_integral[k] + dt_ * rec_.e_a[k], -c, c);
  }
  return rec_;
}

}  // namespace vdc
