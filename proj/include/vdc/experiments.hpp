#pragma once

// Batch protocols: the Z-width sweep, tracking runs and the invariant suite.

#include "vdc/scenario.hpp"
#include "vdc/simulation.hpp"

#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace vdc {

/// Evenly spaced ascending values start, start + step, ..., stop.
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
  std::vector<double> values() const;
};

struct ZWidthSpec {
  Grid damping{0.0, 60.0, 5.0};   // b_e, N s/m
  Grid mass{0.0, 1.68, 0.14};     // m_d, kg
  double k_max = 20000.0;         // N/m
  double resolution = 10.0;       // N/m
  Scenario base;                  // contact template; wall element and k_e are set per run
};

struct WallVerdict {
  bool completed = false;
  bool passive = false;  // completed and min E_c >= -kEnergySlack
  double min_energy = 0.0;
  std::string failure;
};

/// One template run with the given element, element value and stiffness.
WallVerdict wall_run(const Scenario& base, WallElement element, double value, double k_e);

struct ZWidthPoint {
  double value = 0.0;
  double k_star = 0.0;
  double min_energy = 0.0;  // at k_star
  int runs = 0;
  std::string diagnostic;   // set when even k_e = 0 is not passive, or on errors
};

/// Largest k_e on the resolution grid in [0, k_max] whose run is passive and
/// bounded, by bisection. Assumes a single passive/non-passive transition.
ZWidthPoint max_passive_stiffness(const ZWidthSpec& spec, WallElement element, double value);

struct ZWidthCurve {
  WallElement element = WallElement::None;
  std::vector<ZWidthPoint> points;
  bool monotone() const;
  /// Smallest element value whose k_star differs from the value-0 baseline;
  /// negative when none does.
  double critical_value() const;
};

struct ZWidthResult {
  ZWidthCurve mass;
  ZWidthCurve damping;
};

struct SweepOptions {
  int workers = 1;
  std::string checkpoint;          // empty: no checkpoint
  int max_new_points = -1;         // stop after this many computed points (interruption tests)
  std::function<void(const std::string&)> progress;
};

/// Both curves. Grid points run on a worker pool and merge by index; points
/// already in the checkpoint are reused. Returns false in `complete` when
/// stopped early by max_new_points.
ZWidthResult zwidth_sweep(const ZWidthSpec& spec, const SweepOptions& opt, bool* complete = nullptr);

/// Identity string of a sweep; a checkpoint is only reused for the same one.
std::string zwidth_fingerprint(const ZWidthSpec& spec);

inline constexpr const char* kCurveSchema = "# vdcbench.zwidth v1";
void write_curve_csv(std::ostream& os, const ZWidthCurve& curve);
std::string zwidth_json(const ZWidthSpec& spec, const ZWidthResult& r);

/// Error, force, torque and energy metrics of one tracking run.
struct TrackingMetrics {
  bool stable = false;
  std::string failure;
  double rms_ep_z_mm = 0.0;
  double rms_ep_xy_mm = 0.0;
  double max_ep_xy_mm = 0.0;
  double rms_eo_deg = 0.0;
  double max_eo_deg = 0.0;
  double max_contact_force = 0.0;
  double rms_tau = 0.0;
  double min_energy = 0.0;
  bool passive = false;
};

/// Square-path contact run with the tracking presets' protocol.
Scenario tracking_scenario(double t_f, double k_e, double m_d);
TrackingMetrics tracking_experiment(const Scenario& s);
TrackingMetrics tracking_experiment(double t_f, double k_e, double m_d);

// ---- invariant suite -------------------------------------------------------

struct PropertyResult {
  std::string name;
  std::string tolerance;
  int checked = 0;
  int failed = 0;
  double worst = 0.0;           // largest measured error
  std::string counterexample;   // first failing input, after shrinking
  bool passed() const { return failed == 0; }
};

struct VerifyOptions {
  int samples = 200;
  std::uint64_t seed = 7;
  /// Applied to every rigid-body regressor the suite evaluates; used to check
  /// that a broken regressor is caught.
  std::function<Mat6x10(const Mat6x10&)> regressor_mutation;
};

std::vector<PropertyResult> verify_suite(const VerifyOptions& opt = {});
void print_report(std::ostream& os, const std::vector<PropertyResult>& r, bool verbose);

}  // namespace vdc
