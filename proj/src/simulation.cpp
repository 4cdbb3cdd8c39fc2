#include "vdc/simulation.hpp"

#include "vdc/diagnostics.hpp"
#include "vdc/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace vdc {

namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

// Rotation vector of R relative to R_ref, ground axes.
Vec3 rotation_vector(const Mat3& r, const Mat3& r_ref) {
  const Eigen::AngleAxisd aa(r * r_ref.transpose());
  return aa.angle() * aa.axis();
}

InertialParams perturbed(const InertialParams& phi, double rel, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-rel, rel);
  Vec10 p = phi.vector();
  for (int i = 0; i < 10; ++i) p[i] *= 1.0 + u(rng);
  // Floor relative to the true smallest eigenvalue keeps the estimate's
  // conditioning comparable to the true one.
  const double floor = 0.1 * nal_map(phi).min_eigenvalue();
  const LMatrix l = project_positive_definite(nal_map(InertialParams(p)).matrix(), floor);
  return nal_unmap(l);
}

PathSample target_path(const Scenario& s, const Vec3& start, double t) {
  SquarePathSpec spec;
  spec.start = start;
  spec.side = s.side;
  spec.segment_time = s.segment_time;
  spec.first_direction = s.first_direction;
  spec.second_direction = s.second_direction;
  switch (s.path) {
    case PathKind::Hold: {
      PathSample out;
      out.position = start + s.hold_offset;
      return out;
    }
    case PathKind::Press: {
      if (t >= s.segment_time) {
        PathSample out;
        out.position = start + s.side * s.first_direction;
        return out;
      }
      return square_path(spec, t);
    }
    case PathKind::Square: return square_path(spec, t);
  }
  return {};
}

double min_eig(const std::vector<LMatrix>& ls, std::vector<double>* out) {
  double m = std::numeric_limits<double>::infinity();
  if (out) out->resize(ls.size());
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const double e = ls[k].min_eigenvalue();
    if (out) (*out)[k] = e;
    m = std::min(m, e);
  }
  return m;
}

}  // namespace

VecX plant_step(const RobotModel& model, VecX& q, VecX& qd, const VecX& tau, const Vec6& f_ext, double h) {
  const VecX qdd = model.forward_dynamics(q, qd, tau, f_ext);
  qd += h * qdd;
  q += h * qd;
  return qdd;
}

RunLog run_scenario(const Scenario& s, const RunHooks& hooks) {
  RunLog log;
  RunSummary& sum = log.summary;
  if (!s.model) throw std::invalid_argument("run_scenario: scenario has no robot model");
  const RobotModel& model = *s.model;
  const int n = model.dof();
  if (!(s.dt > 0.0) || s.substeps < 1 || s.duration < 0.0) {
    throw std::invalid_argument("run_scenario: dt > 0, substeps >= 1 and duration >= 0 are required");
  }
  const VecX q_start = s.q_start.size() == n ? s.q_start : default_start_configuration(n);

  std::mt19937_64 rng(s.seed);
  std::vector<InertialParams> bodies, actuators;
  for (int k = 0; k < n; ++k) bodies.push_back(perturbed(model.link(k).body, s.param_error, rng));
  for (int k = 0; k < n; ++k) actuators.push_back(perturbed(model.link(k).actuator, s.param_error, rng));
  VecX q(n);
  {
    std::uniform_real_distribution<double> u(-s.q_spread, s.q_spread);
    for (int k = 0; k < n; ++k) {
      q[k] = std::clamp(q_start[k] + u(rng), model.link(k).q_min, model.link(k).q_max);
    }
  }
  VecX qd = VecX::Zero(n);
  std::normal_distribution<double> noise(0.0, 1.0);

  VdcController ctrl(model, s.gains, s.dt, bodies, actuators);
  if (hooks.on_start) hooks.on_start(ctrl);

  const double h = s.dt / s.substeps;
  sum.min_l_eig = std::min(min_eig(ctrl.state().adaptation.bodies, nullptr),
                           min_eig(ctrl.state().adaptation.actuators, nullptr));

  auto check_state = [&](double ep) {
    if (!q.allFinite() || !qd.allFinite()) throw NumericalFault("state became non-finite");
    if (qd.cwiseAbs().maxCoeff() > s.qd_limit) throw NumericalFault("joint rate limit exceeded");
    if (ep > s.error_limit) throw NumericalFault("position error limit exceeded");
  };

  auto record_common = [&](TickLog& row, const TickRecord& rec, const ChainKinematics& kin,
                           const VecX& q_tick, const VecX& qd_tick) {
    row.q = q_tick;
    row.qd = qd_tick;
    row.tau = rec.tau;
    const Pose ee = kin.end_effector();
    row.p = ee.position;
    const UnitQuaternion uq = UnitQuaternion::from_rotation(ee.rotation);
    row.quat << uq.w(), uq.vec();
    row.sigma_min = rec.sigma_min;
    min_eig(ctrl.state().adaptation.bodies, &row.lmin_body);
    min_eig(ctrl.state().adaptation.actuators, &row.lmin_act);
    for (double e : row.lmin_body) sum.min_l_eig = std::min(sum.min_l_eig, e);
    for (double e : row.lmin_act) sum.min_l_eig = std::min(sum.min_l_eig, e);
  };

  try {
    // Calibration: joint regulation to the start configuration.
    double t = 0.0;
    const int max_cal = static_cast<int>(std::ceil(s.calibration_timeout / s.dt));
    for (int k = 0; k <= max_cal; ++k) {
      if ((q - q_start).cwiseAbs().maxCoeff() < s.calibration_tolerance &&
          qd.cwiseAbs().maxCoeff() < s.calibration_settle_velocity) {
        sum.calibrated = true;
        break;
      }
      if (k == max_cal) break;
      const ChainKinematics kin = model.forward_kinematics(q);
      const TickRecord& rec = ctrl.regulate(q, qd, q_start);
      TickLog row;
      row.phase = 1;
      row.t = t;
      record_common(row, rec, kin, q, qd);
      row.p_d = row.p;
      if (s.record && s.log_calibration) log.ticks.push_back(std::move(row));
      const VecX tau = rec.tau;
      for (int j = 0; j < s.substeps; ++j) {
        plant_step(model, q, qd, tau, Vec6::Zero(), h);
      }
      t += s.dt;
      check_state(0.0);
    }
    sum.calibration_time = t;
    if (!sum.calibrated) {
      sum.failure = "calibration did not reach the start configuration";
      return log;
    }

    // Impedance phase. qd_r switches laws here, so its derivative restarts.
    ctrl.restart_differentiator();
    if (hooks.on_impedance_start) hooks.on_impedance_start(ctrl);
    const ChainKinematics kin0 = model.forward_kinematics(q_start);
    const Pose start = kin0.end_effector();
    ImpedanceTarget target = s.impedance;
    target.orientation = UnitQuaternion::from_rotation(start.rotation);
    WallParams wall = s.wall;
    wall.position = wall.axis.dot(start.position) + s.wall.position;
    WallMonitor monitor(wall, s.dt, s.accel_cutoff_hz, s.energy_rule);

    auto task_state = [&](const ChainKinematics& kin) {
      Vec6 x;
      x << kin.end_effector().position, rotation_vector(kin.end_effector().rotation, start.rotation);
      return x;
    };
    HumanArm arm(s.human, task_state(model.forward_kinematics(q)));
    const bool human = s.human_enabled;

    const int ticks = static_cast<int>(std::llround(s.impedance_duration() / s.dt));
    double sq_z = 0, sq_xy = 0, sq_o = 0, sq_tau = 0;
    for (int k = 0; k < ticks; ++k) {
      const double tp = k * s.dt;
      const ChainKinematics kin = model.forward_kinematics(q);
      const Jacobian jac = model.jacobian(kin);
      const Vec6 xdot = jac * qd;
      const ContactState& cs = monitor.update(kin.end_effector().position, xdot.head<3>());
      const Vec6 f_h = human ? arm.force(task_state(kin)) : Vec6::Zero();
      Vec6 f = compose_external_force(f_h, cs.force, wall.axis, s.mode);
      if (s.force_noise > 0.0) {
        for (int i = 0; i < 6; ++i) f[i] += s.force_noise * noise(rng);
      }
      const PathSample ps = target_path(s, start.position, tp);
      target.position = ps.position;
      target.velocity << ps.velocity, Vec3::Zero();

      ControllerState before;
      if (s.diagnostics) before = ctrl.state();
      const VecX q_tick = q;
      const TickRecord& rec = ctrl.tick(q, qd, target, f);
      const VecX tau = rec.tau;

      const VecX qd_tick = qd;
      // Plant substeps; the first acceleration doubles as the diagnostics snapshot.
      VecX qdd0;
      ChainKinematics kin_j = kin;
      for (int j = 0; j < s.substeps; ++j) {
        Vec6 f_ext = human ? arm.force(task_state(kin_j)) : Vec6::Zero();
        if (s.wall_on_plant) f_ext.head<3>() -= cs.force * wall.axis;
        const VecX qdd = plant_step(model, q, qd, tau, f_ext, h);
        if (j == 0) qdd0 = qdd;
        if (human) arm.step(task_state(kin_j), h);
        const double s_before = wall.axis.dot(kin_j.end_effector().position);
        kin_j = model.forward_kinematics(q);
        monitor.add_held_work(wall.axis.dot(kin_j.end_effector().position) - s_before);
      }

      const double ep = rec.pose_error.head<3>().norm();
      check_state(ep);
      if (std::abs(cs.force) > s.force_limit) throw NumericalFault("contact force limit exceeded");

      const Vec6& e = rec.pose_error;
      sq_z += e[2] * e[2];
      sq_xy += e[0] * e[0] + e[1] * e[1];
      sum.max_ep_xy = std::max(sum.max_ep_xy, std::hypot(e[0], e[1]));
      const double eo = e.tail<3>().norm() * kRadToDeg;
      sq_o += eo * eo;
      sum.max_eo_deg = std::max(sum.max_eo_deg, eo);
      sq_tau += tau.squaredNorm();
      sum.max_contact_force = std::max(sum.max_contact_force, std::abs(cs.force));
      sum.final_ep = ep;
      sum.damped_ticks += rec.damped ? 1 : 0;
      ++sum.ticks;

      TickLog row;
      row.phase = 2;
      row.t = sum.calibration_time + tp;
      // Rows describe the state the tick acted on.
      record_common(row, rec, kin, q_tick, qd_tick);
      row.p_d = target.position;
      row.pose_error = rec.pose_error;
      row.f = f;
      row.f_h = f_h;
      row.f_c = cs.force;
      row.penetration = cs.penetration;
      row.e_c = cs.energy;
      if (s.diagnostics) {
        const AccompanyingTerms nu = accompanying_function(model, s.gains, before, rec);
        row.nu = nu.total();
        row.nu_literal = nu.total_literal();
        Vec6 load = -f_h;
        if (s.wall_on_plant) load.head<3>() += cs.force * wall.axis;
        const PlantForces pf = plant_forces(model, kin, qd_tick, qdd0, load);
        const TelescopingTerms tt = telescoping_check(model, rec, pf);
        row.telescoping = tt.relative();
        row.p_tip = tt.p_end;
        row.vpf_body = tt.p_body;
        row.bound = decrease_bound(s.gains, rec, tt.p_end);
        sum.max_telescoping = std::max(sum.max_telescoping, row.telescoping);
      }
      if (s.record) log.ticks.push_back(std::move(row));
    }
    const double m = std::max(1, sum.ticks);
    sum.rms_ep_z = std::sqrt(sq_z / m);
    sum.rms_ep_xy = std::sqrt(sq_xy / m);
    sum.rms_eo_deg = std::sqrt(sq_o / m);
    sum.rms_tau = std::sqrt(sq_tau / (m * n));
    sum.min_energy = monitor.state().min_energy;
    sum.final_energy = monitor.state().energy;
    sum.passive = sum.min_energy >= -kEnergySlack;
    sum.completed = true;
  } catch (const NumericalFault& e) {
    sum.blew_up = true;
    sum.failure = e.what();
  }
  sum.nal_halvings = ctrl.state().halvings;
  return log;
}

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const RunLog& log, int n) {
  os << kRunLogSchema << '\n';
  std::vector<std::string> cols = {"phase", "t"};
  auto indexed = [&](const char* base, int count) {
    for (int i = 1; i <= count; ++i) cols.push_back(std::string(base) + std::to_string(i));
  };
  indexed("q", n);
  indexed("qd", n);
  indexed("tau", n);
  for (const char* c : {"px", "py", "pz", "qw", "qx", "qy", "qz", "pdx", "pdy", "pdz", "epx", "epy", "epz",
                        "eox", "eoy", "eoz", "fx", "fy", "fz", "mx", "my", "mz", "fhx", "fhy", "fhz",
                        "mhx", "mhy", "mhz", "fc", "penetration", "Ec", "nu", "nu_literal", "nu_bound",
                        "telescoping", "p_tip", "sigma_min"}) {
    cols.push_back(c);
  }
  indexed("vpf_b", n);
  indexed("lmin_b", n);
  indexed("lmin_a", n);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';

  std::string line;
  auto put = [&](double x) {
    line += format_double(x);
    line += ',';
  };
  auto put_vec = [&](const auto& v, int count) {
    for (int i = 0; i < count; ++i) put(i < static_cast<int>(v.size()) ? v[i] : 0.0);
  };
  for (const TickLog& r : log.ticks) {
    line.clear();
    line += std::to_string(r.phase);
    line += ',';
    put(r.t);
    put_vec(r.q, n);
    put_vec(r.qd, n);
    put_vec(r.tau, n);
    put_vec(r.p, 3);
    put_vec(r.quat, 4);
    put_vec(r.p_d, 3);
    put_vec(r.pose_error, 6);
    put_vec(r.f, 6);
    put_vec(r.f_h, 6);
    for (double x : {r.f_c, r.penetration, r.e_c, r.nu, r.nu_literal, r.bound, r.telescoping, r.p_tip,
                     r.sigma_min}) {
      put(x);
    }
    put_vec(r.vpf_body, n);
    put_vec(r.lmin_body, n);
    put_vec(r.lmin_act, n);
    line.back() = '\n';
    os << line;
  }
}

std::string summary_json(const Scenario& s, const RunLog& log) {
  const RunSummary& m = log.summary;
  nlohmann::ordered_json j;
  j["schema"] = "vdcbench.summary v1";
  j["scenario"] = s.name;
  j["seed"] = s.seed;
  j["completed"] = m.completed;
  j["blew_up"] = m.blew_up;
  j["failure"] = m.failure;
  j["calibrated"] = m.calibrated;
  j["calibration_time"] = m.calibration_time;
  j["ticks"] = m.ticks;
  j["rms_ep_z_mm"] = 1e3 * m.rms_ep_z;
  j["rms_ep_xy_mm"] = 1e3 * m.rms_ep_xy;
  j["max_ep_xy_mm"] = 1e3 * m.max_ep_xy;
  j["rms_eo_deg"] = m.rms_eo_deg;
  j["max_eo_deg"] = m.max_eo_deg;
  j["rms_tau"] = m.rms_tau;
  j["max_contact_force"] = m.max_contact_force;
  j["min_Ec"] = m.min_energy;
  j["final_Ec"] = m.final_energy;
  j["passive"] = m.passive;
  j["min_L_eigenvalue"] = m.min_l_eig;
  j["nal_halvings"] = m.nal_halvings;
  j["damped_ticks"] = m.damped_ticks;
  j["max_telescoping_residual"] = m.max_telescoping;
  j["human_arm"] = {{"mass", std::vector<double>(s.human.mass.data(), s.human.mass.data() + 6)},
                    {"damping", std::vector<double>(s.human.damping.data(), s.human.damping.data() + 6)},
                    {"stiffness", std::vector<double>(s.human.stiffness.data(), s.human.stiffness.data() + 6)},
                    {"enabled", s.human_enabled}};
  return j.dump(2);
}

}  // namespace vdc
