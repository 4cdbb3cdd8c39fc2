#pragma once

// Fixed-step closed loop: calibration by joint regulation, then impedance
// control along the scenario path with the human arm and the virtual wall.

#include "vdc/scenario.hpp"

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace vdc {

struct TickLog {
  int phase = 0;  // 1 calibration, 2 impedance
  double t = 0.0;
  VecX q, qd, tau;
  Vec3 p = Vec3::Zero();
  Eigen::Vector4d quat = Eigen::Vector4d::Zero();  // w, x, y, z
  Vec3 p_d = Vec3::Zero();
  Vec6 pose_error = Vec6::Zero();
  Vec6 f = Vec6::Zero();     // measured, robot on environment
  Vec6 f_h = Vec6::Zero();   // arm reaction on the handle
  double f_c = 0.0;
  double penetration = 0.0;
  double e_c = 0.0;
  double nu = 0.0;
  double nu_literal = 0.0;
  double bound = 0.0;
  double telescoping = 0.0;  // relative residual
  double p_tip = 0.0;
  std::vector<double> vpf_body;
  std::vector<double> lmin_body;
  std::vector<double> lmin_act;
  double sigma_min = 0.0;
};

struct RunSummary {
  bool completed = false;
  bool blew_up = false;
  std::string failure;          // empty when completed
  double calibration_time = 0.0;
  bool calibrated = false;
  int ticks = 0;
  double rms_ep_z = 0.0, rms_ep_xy = 0.0, max_ep_xy = 0.0;
  double rms_eo_deg = 0.0, max_eo_deg = 0.0;
  double rms_tau = 0.0;
  double max_contact_force = 0.0;
  double min_energy = 0.0;
  double final_energy = 0.0;
  bool passive = true;
  double min_l_eig = 0.0;       // over every estimate and tick
  int nal_halvings = 0;
  int damped_ticks = 0;
  double max_telescoping = 0.0;
  double final_ep = 0.0;        // |e_p| at the last tick
};

struct RunLog {
  std::vector<TickLog> ticks;
  RunSummary summary;
};

/// Hook for code that needs the live controller, e.g. fault injection.
struct RunHooks {
  std::function<void(VdcController&)> on_start;
  /// After calibration, before the first impedance tick.
  std::function<void(VdcController&)> on_impedance_start;
};

RunLog run_scenario(const Scenario& s, const RunHooks& hooks = {});

/// Semi-implicit Euler step of the plant: qd first, then q with the new qd.
/// Returns the acceleration used.
VecX plant_step(const RobotModel& model, VecX& q, VecX& qd, const VecX& tau, const Vec6& f_ext, double h);

/// Passivity slack on the contact energy.
inline constexpr double kEnergySlack = 1e-6;

/// CSV: a schema line, a header line, then one row per tick.
inline constexpr const char* kRunLogSchema = "# vdcbench.runlog v1";
void write_csv(std::ostream& os, const RunLog& log, int dof);
std::string summary_json(const Scenario& s, const RunLog& log);

/// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double x);

/// Applies `fn` to indices [0, n) on up to `workers` threads; results keep
/// index order.
template <typename R>
std::vector<R> parallel_map(int n, int workers, const std::function<R(int)>& fn);

}  // namespace vdc

#include "vdc/parallel.inl"
