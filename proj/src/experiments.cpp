#include "vdc/experiments.hpp"

#include "vdc/config.hpp"
#include "vdc/diagnostics.hpp"
#include "vdc/errors.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

namespace vdc {

using json = nlohmann::ordered_json;

std::vector<double> Grid::values() const {
  std::vector<double> out;
  if (!(step > 0.0) || stop < start) return out;
  // Index-based so the values do not accumulate rounding.
  const long n = std::lround(std::floor((stop - start) / step + 1e-9));
  // Round to 12 digits so 0.14*3 prints as 0.42.
  char buf[32];
  for (long i = 0; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", start + static_cast<double>(i) * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

// ---- Z-width ---------------------------------------------------------------

WallVerdict wall_run(const Scenario& base, WallElement element, double value, double k_e) {
  Scenario s = base;
  s.wall.enabled = true;
  s.wall.stiffness = k_e;
  s.wall.element = value > 0.0 ? element : WallElement::None;
  s.wall.mass = element == WallElement::VaryingMass ? value : 0.0;
  s.wall.damping = element == WallElement::Damping ? value : 0.0;
  s.diagnostics = false;
  s.record = false;
  const RunSummary r = run_scenario(s).summary;
  WallVerdict v;
  v.completed = r.completed && !r.blew_up;
  v.min_energy = r.min_energy;
  v.passive = v.completed && r.min_energy >= -kEnergySlack;
  v.failure = r.failure;
  return v;
}

ZWidthPoint max_passive_stiffness(const ZWidthSpec& spec, WallElement element, double value) {
  ZWidthPoint p;
  p.value = value;
  const double res = spec.resolution;
  const long top = std::lround(std::floor(spec.k_max / res + 1e-9));
  auto run = [&](long i) {
    ++p.runs;
    return wall_run(spec.base, element, value, static_cast<double>(i) * res);
  };

  WallVerdict v = run(top);
  if (v.passive) {
    p.k_star = static_cast<double>(top) * res;
    p.min_energy = v.min_energy;
    return p;
  }
  v = run(0);
  if (!v.passive) {
    p.k_star = 0.0;
    p.min_energy = v.min_energy;
    p.diagnostic = v.completed ? "not passive even at k_e = 0" : "unbounded even at k_e = 0: " + v.failure;
    return p;
  }
  // Invariant: lo passive, hi not.
  long lo = 0, hi = top;
  double lo_energy = v.min_energy;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    const WallVerdict m = run(mid);
    if (m.passive) {
      lo = mid;
      lo_energy = m.min_energy;
    } else {
      hi = mid;
    }
  }
  p.k_star = static_cast<double>(lo) * res;
  p.min_energy = lo_energy;
  return p;
}

bool ZWidthCurve::monotone() const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].k_star < points[i - 1].k_star) return false;
  }
  return true;
}

double ZWidthCurve::critical_value() const {
  if (points.empty()) return -1.0;
  for (const ZWidthPoint& p : points) {
    if (p.k_star != points.front().k_star) return p.value;
  }
  return -1.0;
}

std::string zwidth_fingerprint(const ZWidthSpec& spec) {
  Config c;
  c.scenario = spec.base;
  c.zwidth = spec;
  json j = config_to_json(c);
  if (spec.base.model) j["robot"] = robot_to_json(*spec.base.model);
  return j.dump();
}

namespace {

const char* element_name(WallElement e) {
  switch (e) {
    case WallElement::VaryingMass: return "mass";
    case WallElement::Damping: return "damping";
    case WallElement::None: return "none";
  }
  return "none";
}

json point_json(const std::string& curve, int index, const ZWidthPoint& p) {
  return json{{"curve", curve},         {"index", index},       {"value", p.value},
              {"k_star", p.k_star},     {"min_Ec", p.min_energy}, {"runs", p.runs},
              {"diagnostic", p.diagnostic}};
}

ZWidthPoint point_from_json(const json& j) {
  ZWidthPoint p;
  p.value = j.at("value").get<double>();
  p.k_star = j.at("k_star").get<double>();
  p.min_energy = j.at("min_Ec").get<double>();
  p.runs = j.at("runs").get<int>();
  p.diagnostic = j.at("diagnostic").get<std::string>();
  return p;
}

// Checkpoint: first line {"fingerprint": ...}, then one JSON object per
// finished point. A truncated last line (interrupted write) is ignored.
std::map<std::pair<std::string, int>, ZWidthPoint> read_checkpoint(const std::string& path,
                                                                   const std::string& fingerprint) {
  std::map<std::pair<std::string, int>, ZWidthPoint> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  if (!std::getline(in, line)) return done;
  json head = json::parse(line, nullptr, false);
  if (head.is_discarded() || !head.contains("fingerprint") || head["fingerprint"] != fingerprint) {
    throw ConfigError(path, "checkpoint belongs to a different sweep; remove it or choose another path");
  }
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    done[{j.at("curve").get<std::string>(), j.at("index").get<int>()}] = point_from_json(j);
  }
  return done;
}

}  // namespace

ZWidthResult zwidth_sweep(const ZWidthSpec& spec, const SweepOptions& opt, bool* complete) {
  struct Task {
    WallElement element;
    int index;
    double value;
  };
  std::vector<Task> tasks;
  const std::vector<double> mv = spec.mass.values();
  const std::vector<double> dv = spec.damping.values();
  for (int i = 0; i < static_cast<int>(mv.size()); ++i) tasks.push_back({WallElement::VaryingMass, i, mv[i]});
  for (int i = 0; i < static_cast<int>(dv.size()); ++i) tasks.push_back({WallElement::Damping, i, dv[i]});

  const std::string fp = zwidth_fingerprint(spec);
  std::map<std::pair<std::string, int>, ZWidthPoint> done;
  std::ofstream ckpt;
  if (!opt.checkpoint.empty()) {
    done = read_checkpoint(opt.checkpoint, fp);
    const bool fresh = done.empty();
    if (fresh) {
      ckpt.open(opt.checkpoint, std::ios::trunc);
      ckpt << json{{"fingerprint", fp}}.dump() << "\n";
    } else {
      ckpt.open(opt.checkpoint, std::ios::app);
    }
    ckpt.flush();
  }

  std::mutex mu;
  std::atomic<int> budget(opt.max_new_points);
  std::atomic<bool> stopped(false);
  std::function<std::optional<ZWidthPoint>(int)> job = [&](int k) -> std::optional<ZWidthPoint> {
    const Task& t = tasks[k];
    const std::string curve = element_name(t.element);
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = done.find({curve, t.index});
      if (it != done.end()) return it->second;
    }
    if (opt.max_new_points >= 0 && budget.fetch_sub(1) <= 0) {
      stopped = true;
      return std::nullopt;
    }
    ZWidthPoint p;
    try {
      p = max_passive_stiffness(spec, t.element, t.value);
    } catch (const std::exception& e) {
      p.value = t.value;
      p.diagnostic = std::string("error: ") + e.what();
    }
    std::lock_guard<std::mutex> lock(mu);
    if (ckpt.is_open()) {
      ckpt << point_json(curve, t.index, p).dump() << "\n";
      ckpt.flush();
    }
    if (opt.progress) {
      std::ostringstream msg;
      msg << curve << " " << t.value << ": k_e* = " << p.k_star << " N/m, min E_c = " << p.min_energy << " J ("
          << p.runs << " runs)" << (p.diagnostic.empty() ? "" : ", " + p.diagnostic);
      opt.progress(msg.str());
    }
    return p;
  };
  const auto results = parallel_map<std::optional<ZWidthPoint>>(static_cast<int>(tasks.size()), opt.workers, job);

  ZWidthResult r;
  r.mass.element = WallElement::VaryingMass;
  r.damping.element = WallElement::Damping;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (!results[k]) continue;
    (tasks[k].element == WallElement::VaryingMass ? r.mass : r.damping).points.push_back(*results[k]);
  }
  if (complete) *complete = !stopped;
  return r;
}

void write_curve_csv(std::ostream& os, const ZWidthCurve& curve) {
  os << kCurveSchema << "\n";
  os << "element_value,k_e_max,min_Ec\n";
  for (const ZWidthPoint& p : curve.points) {
    os << format_double(p.value) << "," << format_double(p.k_star) << "," << format_double(p.min_energy) << "\n";
  }
}

std::string zwidth_json(const ZWidthSpec& spec, const ZWidthResult& r) {
  Config c;
  c.scenario = spec.base;
  c.zwidth = spec;
  json j;
  j["schema"] = "vdcbench.zwidth-summary/1";
  j["config"] = config_to_json(c);
  auto curve = [](const ZWidthCurve& cv) {
    json pts = json::array();
    for (const ZWidthPoint& p : cv.points) {
      pts.push_back(json{{"value", p.value}, {"k_e_max", p.k_star}, {"min_Ec", p.min_energy},
                         {"runs", p.runs}, {"diagnostic", p.diagnostic}});
    }
    const double crit = cv.critical_value();
    return json{{"points", pts}, {"monotone", cv.monotone()},
                {"critical_value", crit >= 0.0 ? json(crit) : json(nullptr)}};
  };
  j["mass"] = curve(r.mass);
  j["damping"] = curve(r.damping);
  j["human_arm"] = json{{"M_h", std::vector<double>(spec.base.human.mass.data(), spec.base.human.mass.data() + 6)},
                        {"B_h", std::vector<double>(spec.base.human.damping.data(), spec.base.human.damping.data() + 6)},
                        {"K_h", std::vector<double>(spec.base.human.stiffness.data(), spec.base.human.stiffness.data() + 6)},
                        {"enabled", spec.base.human_enabled}};
  return j.dump(2);
}

// ---- tracking --------------------------------------------------------------

Scenario tracking_scenario(double t_f, double k_e, double m_d) {
  Scenario s = preset("fig5");
  s.name = "tracking";
  s.segment_time = t_f;
  s.wall.stiffness = k_e;
  s.wall.mass = m_d;
  s.wall.element = m_d > 0.0 ? WallElement::VaryingMass : WallElement::None;
  s.diagnostics = false;
  s.record = false;
  return s;
}

TrackingMetrics tracking_experiment(const Scenario& s) {
  const RunSummary r = run_scenario(s).summary;
  TrackingMetrics m;
  m.stable = r.completed && !r.blew_up;
  m.failure = r.failure;
  m.rms_ep_z_mm = 1e3 * r.rms_ep_z;
  m.rms_ep_xy_mm = 1e3 * r.rms_ep_xy;
  m.max_ep_xy_mm = 1e3 * r.max_ep_xy;
  m.rms_eo_deg = r.rms_eo_deg;
  m.max_eo_deg = r.max_eo_deg;
  m.max_contact_force = r.max_contact_force;
  m.rms_tau = r.rms_tau;
  m.min_energy = r.min_energy;
  m.passive = r.passive && m.stable;
  return m;
}

TrackingMetrics tracking_experiment(double t_f, double k_e, double m_d) {
  return tracking_experiment(tracking_scenario(t_f, k_e, m_d));
}

// ---- invariant suite -------------------------------------------------------

namespace {

using Rng = std::mt19937_64;

// A property draws a flat input vector, decodes it and measures an error.
// Decoders accept any vector, so zeroing entries while shrinking stays valid.
struct Property {
  std::string name;
  std::string tolerance;
  double tol;
  int count;
  std::function<VecX(Rng&)> draw;
  std::function<double(const VecX&)> error;
};

VecX uniform(Rng& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Mat3 rotation_from(const Vec3& w) {
  const double a = w.norm();
  if (a == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(a, w / a).toRotationMatrix();
}

// Physically consistent parameters from 10 free numbers: mass, centre of
// mass, and a Cholesky factor of the inertia about the centre of mass.
InertialParams params_from(const VecX& x, int at) {
  const double m = 0.1 + std::abs(x[at]);
  const Vec3 com = x.segment<3>(at + 1) * 0.2;
  Mat3 l = Mat3::Zero();
  l(0, 0) = 0.05 + std::abs(x[at + 4]) * 0.1;
  l(1, 1) = 0.05 + std::abs(x[at + 5]) * 0.1;
  l(2, 2) = 0.05 + std::abs(x[at + 6]) * 0.1;
  l(1, 0) = 0.05 * x[at + 7];
  l(2, 0) = 0.05 * x[at + 8];
  l(2, 1) = 0.05 * x[at + 9];
  // Second moments from a positive semidefinite density covariance keep
  // the pseudo-inertia positive definite.
  const Mat3 cov = l * l.transpose();
  const Mat3 i_com = cov.trace() * Mat3::Identity() - cov;
  return InertialParams::from_com(m, com, m * i_com);
}

double rel(const VecX& a, const VecX& b) {
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

std::string format_vector(const VecX& x) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << format_double(x[i]);
  os << "]";
  return os.str();
}

std::vector<Property> properties(const VerifyOptions& opt) {
  const int n = std::max(1, opt.samples);
  auto model = std::make_shared<const RobotModel>(RobotModel::default_arm());
  const int dof = model->dof();
  std::vector<Property> ps;

  ps.push_back({"spatial.power_invariance", "rel 1e-12", 1e-12, n,
                [](Rng& r) { return uniform(r, 18); },
                [](const VecX& x) {
                  const FrameTransform t(rotation_from(x.segment<3>(0)), x.segment<3>(3), FrameId::body(1),
                                         FrameId::tip(1));
                  const auto v = SpatialVelocity::from_stacked(x.segment<6>(6), FrameId::body(1));
                  const auto f = SpatialForce::from_stacked(x.segment<6>(12), FrameId::tip(1));
                  const double a = power(transform_velocity(t, v), f);
                  const double b = power(v, transform_force(t, f));
                  return std::abs(a - b) / std::max(1.0, std::abs(a));
                }});
  ps.push_back({"spatial.composition", "rel 1e-12", 1e-12, n,
                [](Rng& r) { return uniform(r, 18); },
                [](const VecX& x) {
                  const FrameTransform ab(rotation_from(x.segment<3>(0)), x.segment<3>(3), FrameId::body(1),
                                          FrameId::tip(1));
                  const FrameTransform bc(rotation_from(x.segment<3>(6)), x.segment<3>(9), FrameId::tip(1),
                                          FrameId::body(2));
                  const auto v = SpatialVelocity::from_stacked(x.segment<6>(12), FrameId::body(1));
                  const Vec6 direct = transform_velocity(compose(ab, bc), v).stacked();
                  const Vec6 chained = transform_velocity(bc, transform_velocity(ab, v)).stacked();
                  return rel(direct, chained);
                }});

  ps.push_back({"nal.round_trip", "rel 1e-14", 1e-14, n,
                [](Rng& r) { return uniform(r, 10); },
                [](const VecX& x) {
                  const InertialParams p = params_from(x, 0);
                  return rel(nal_unmap(nal_map(p)).vector(), p.vector());
                }});
  ps.push_back({"nal.dual_identity", "rel 1e-10", 1e-10, n,
                [](Rng& r) { return uniform(r, 20); },
                [](const VecX& x) {
                  const Vec10 p = x.head<10>(), s = x.tail<10>();
                  const double lhs = (nal_map(InertialParams(p)).matrix() * dual_s_matrix(s)).trace();
                  return std::abs(lhs - p.dot(s)) / std::max(1.0, std::abs(p.dot(s)));
                }});
  ps.push_back({"nal.bregman_nonnegative", "D >= -1e-12", 1e-12, 50 * n,
                [](Rng& r) { return uniform(r, 20); },
                [](const VecX& x) {
                  const LMatrix a = nal_map(params_from(x, 0)), b = nal_map(params_from(x, 10));
                  return std::max(0.0, -bregman_divergence(a, b));
                }});
  ps.push_back({"nal.bregman_rate", "rel 1e-6", 1e-6, n,
                [](Rng& r) { return uniform(r, 36); },
                [](const VecX& x) {
                  const LMatrix lt = nal_map(params_from(x, 0)), lh = nal_map(params_from(x, 10));
                  Mat4 d = Mat4::Zero();
                  for (int i = 0; i < 4; ++i) {
                    for (int j = i; j < 4; ++j) d(i, j) = d(j, i) = x[20 + 4 * i + j] * 0.1;
                  }
                  const double h = 1e-6;
                  const double fd = (bregman_divergence(lt, LMatrix(Mat4(lh.matrix() + h * d))) -
                                     bregman_divergence(lt, LMatrix(Mat4(lh.matrix() - h * d)))) /
                                    (2 * h);
                  const double an = bregman_rate(lt, lh, d);
                  return std::abs(fd - an) / std::max(1.0, std::abs(an));
                }});
  ps.push_back({"nal.update_positive_definite", "min-eig > 0", 0.0, n,
                [](Rng& r) { return uniform(r, 20); },
                [](const VecX& x) {
                  const LMatrix l = nal_map(params_from(x, 0));
                  const Mat4 s = dual_s_matrix(Vec10(x.tail<10>() * 100.0));
                  const NalStep step = nal_update(l, s, 10.0, 1e-3);
                  return step.next.min_eigenvalue() > 0.0 ? 0.0 : 1.0;
                }});

  auto mutate = opt.regressor_mutation;
  ps.push_back({"robot.regressor_identity", "rel 1e-9", 1e-9, n,
                [](Rng& r) { return uniform(r, 31); },
                [mutate](const VecX& x) {
                  const InertialParams phi = params_from(x, 0);
                  const Vec6 v = x.segment<6>(10), vr = x.segment<6>(16), vrd = x.segment<6>(22);
                  const Vec3 g = 10.0 * x.segment<3>(28);
                  Mat6x10 w = rigid_body_regressor(v, vr, vrd, g);
                  if (mutate) w = mutate(w);
                  const Vec6 expected = spatial_inertia(phi) * vrd + coriolis_matrix(phi, v) * vr + gravity_term(phi, g);
                  return rel(w * phi.vector(), expected);
                }});
  ps.push_back({"robot.coriolis_skew", "abs 1e-12", 1e-12, n,
                [](Rng& r) { return uniform(r, 16); },
                [](const VecX& x) {
                  const Mat6 c = coriolis_matrix(params_from(x, 0), x.segment<6>(10));
                  return (c + c.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, c.cwiseAbs().maxCoeff());
                }});
  ps.push_back({"robot.velocity_recursion_vs_jacobian", "rel 1e-12", 1e-12, n,
                [dof](Rng& r) { return uniform(r, 2 * dof); },
                [model, dof](const VecX& x) {
                  const VecX q = x.head(dof), qd = x.tail(dof);
                  const ChainKinematics kin = model->forward_kinematics(q);
                  const ChainVelocities v = model->velocity_recursion(kin, qd);
                  const Pose ee = kin.end_effector();
                  Vec6 tip;
                  tip << ee.rotation * v.tip.back().linear, ee.rotation * v.tip.back().angular;
                  return rel(tip, model->jacobian(kin) * qd);
                }});
  ps.push_back({"robot.jacobian_finite_difference", "rel 1e-6", 1e-6, n,
                [dof](Rng& r) { return uniform(r, 2 * dof); },
                [model, dof](const VecX& x) {
                  const VecX q = x.head(dof), dir = x.tail(dof);
                  const double h = 1e-6;
                  const Pose a = model->forward_kinematics(q + h * dir).end_effector();
                  const Pose b = model->forward_kinematics(q - h * dir).end_effector();
                  Vec6 fd;
                  fd.head<3>() = (a.position - b.position) / (2 * h);
                  const Eigen::AngleAxisd aa(a.rotation * b.rotation.transpose());
                  fd.tail<3>() = aa.angle() * aa.axis() / (2 * h);
                  return rel(fd, model->jacobian(q) * dir);
                }});
  ps.push_back({"robot.gravity_compensation", "abs 1e-9", 1e-9, n,
                [dof](Rng& r) { return uniform(r, dof); },
                [model, dof](const VecX& q) {
                  const ChainKinematics kin = model->forward_kinematics(q);
                  const VecX zero = VecX::Zero(dof);
                  const VecX tau = model->inverse_dynamics(kin, zero, zero, SpatialForce::zero(FrameId::tip(dof))).torque;
                  return model->forward_dynamics(q, zero, tau, Vec6::Zero()).cwiseAbs().maxCoeff();
                }});
  ps.push_back({"robot.inverse_forward_consistency", "rel 1e-9", 1e-9, n,
                [dof](Rng& r) { return uniform(r, 3 * dof); },
                [model, dof](const VecX& x) {
                  const VecX q = x.head(dof), qd = x.segment(dof, dof), qdd = x.tail(dof);
                  const ChainKinematics kin = model->forward_kinematics(q);
                  const VecX tau = model->inverse_dynamics(kin, qd, qdd, SpatialForce::zero(FrameId::tip(dof))).torque;
                  return rel(model->forward_dynamics(q, qd, tau, Vec6::Zero()), qdd);
                }});

  ps.push_back({"controller.impedance_identity", "abs 1e-12", 1e-12, n,
                [](Rng& r) { return uniform(r, 18); },
                [](const VecX& x) {
                  ImpedanceTarget t;
                  t.velocity = x.segment<6>(0);
                  const Vec6 e = 0.1 * x.segment<6>(6), xd = x.segment<6>(12);
                  const Vec6 f = t.force + t.damping.asDiagonal() * (t.velocity - xd) + t.stiffness.asDiagonal() * e;
                  const Vec6 xr = impedance_design_variable(t, e, f);
                  return (t.damping.asDiagonal() * (xr - xd)).cwiseAbs().maxCoeff();
                }});
  ps.push_back({"controller.pseudoinverse", "rel 1e-10", 1e-10, n,
                [dof](Rng& r) { return uniform(r, dof + 6); },
                [model, dof](const VecX& x) {
                  const Jacobian j = model->jacobian(VecX(x.head(dof)));
                  const Vec6 xr = x.tail<6>();
                  const JointMapping m = task_to_joint(j, xr, 1e-4, 1e-3);
                  if (m.damped) return 0.0;
                  return rel(j * m.qd_r, xr);
                }});

  ps.push_back({"interaction.mass_gate_dissipative", "m_e a v >= 0", 0.0, n,
                [](Rng& r) { return uniform(r, 3); },
                [](const VecX& x) {
                  const double me = varying_mass_gate(x[0], x[1], std::abs(x[2]));
                  return std::max(0.0, -me * x[0] * x[1]);
                }});
  ps.push_back({"interaction.spring_continuity", "|f_c| <= k_e |pen|", 1e-12, n,
                [](Rng& r) { return uniform(r, 2); },
                [](const VecX& x) {
                  WallParams w;
                  w.enabled = true;
                  w.stiffness = 1000.0 * std::abs(x[0]);
                  const double s = 1e-9 * x[1];
                  return std::max(0.0, std::abs(contact_force(w, s, 0.0, 0.0)) - w.stiffness * std::abs(s));
                }});
  ps.push_back({"interaction.spring_cycle_energy", "abs 1e-4 J", 1e-4, n,
                [](Rng& r) { return uniform(r, 2); },
                [](const VecX& x) {
                  // Sinusoidal press of depth d into a pure spring at the
                  // stiffnesses of the tracking presets, held-force work.
                  WallParams w;
                  w.enabled = true;
                  w.stiffness = 1000.0 + 500.0 * std::abs(x[0]);
                  const double d = 0.001 + 0.004 * std::abs(x[1]);
                  const double dt = 1e-3, period = 2.0;
                  double e = 0.0, s_prev = -0.001;
                  for (int k = 1; k <= static_cast<int>(period / dt); ++k) {
                    const double s = -0.001 + (d + 0.001) * std::sin(3.14159265358979323846 * k * dt / period);
                    e += contact_force(w, s_prev, 0.0, 0.0) * (s - s_prev);
                    s_prev = s;
                  }
                  return std::abs(e);
                }});

  ps.push_back({"diagnostics.tip_vpf_identity", "abs 1e-12", 1e-12, n,
                [](Rng& r) { return uniform(r, 18); },
                [](const VecX& x) {
                  ImpedanceTarget t;
                  t.velocity = x.segment<6>(0);
                  return std::abs(tip_vpf_identity(t, 0.1 * x.segment<6>(6), x.segment<6>(12)));
                }});
  ps.push_back({"diagnostics.telescoping_run", "rel 1e-9", 1e-9, 1,
                [](Rng&) { return VecX::Zero(1); },
                [](const VecX&) {
                  Scenario s = preset("fig6");
                  s.duration = 1.0;
                  s.log_calibration = false;
                  double worst = 0.0;
                  const RunLog log = run_scenario(s);
                  if (!log.summary.completed) return 1.0;
                  for (const TickLog& t : log.ticks) worst = std::max(worst, t.telescoping);
                  return worst;
                }});
  return ps;
}

}  // namespace

std::vector<PropertyResult> verify_suite(const VerifyOptions& opt) {
  std::vector<PropertyResult> out;
  Rng rng(opt.seed);
  for (const Property& p : properties(opt)) {
    PropertyResult r;
    r.name = p.name;
    r.tolerance = p.tolerance;
    for (int i = 0; i < p.count; ++i) {
      VecX x = p.draw(rng);
      double e;
      try {
        e = p.error(x);
      } catch (const std::exception&) {
        e = std::numeric_limits<double>::infinity();
      }
      ++r.checked;
      if (std::isnan(e) || e > r.worst) r.worst = e;
      if (e <= p.tol) continue;
      ++r.failed;
      if (r.counterexample.empty()) {
        // Shrink: zero entries while the property keeps failing.
        for (int j = 0; j < x.size(); ++j) {
          VecX y = x;
          y[j] = 0.0;
          double ey;
          try {
            ey = p.error(y);
          } catch (const std::exception&) {
            ey = std::numeric_limits<double>::infinity();
          }
          if (!(ey <= p.tol)) x = y;
        }
        r.counterexample = format_vector(x);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

void print_report(std::ostream& os, const std::vector<PropertyResult>& results, bool verbose) {
  int failed = 0;
  for (const PropertyResult& r : results) {
    if (!r.passed()) ++failed;
    if (!verbose && r.passed()) continue;
    os << (r.passed() ? "PASS " : "FAIL ") << std::left << std::setw(40) << r.name << " tol " << std::setw(20)
       << r.tolerance << " checked " << r.checked << " failed " << r.failed << " worst " << r.worst << "\n";
    if (!r.passed()) os << "  counterexample: " << r.counterexample << "\n";
  }
  os << results.size() - failed << "/" << results.size() << " properties passed\n";
}

}  // namespace vdc
