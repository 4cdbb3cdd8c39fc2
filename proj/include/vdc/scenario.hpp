#pragma once

// Scenario description: everything a closed-loop run depends on.

#include "vdc/controller.hpp"
#include "vdc/interaction.hpp"
#include "vdc/robot_model.hpp"
#include "vdc/trajectory.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace vdc {

enum class PathKind {
  Hold,    // constant X_d at the start pose plus `offset`
  Press,   // first edge of the square, then hold its end corner
  Square,  // full square, then hold the start corner
};

struct Scenario {
  std::string name = "default";
  std::string robot_file;  // empty: built-in default arm
  std::shared_ptr<const RobotModel> model;

  ControllerGains gains;
  ImpedanceTarget impedance;

  PathKind path = PathKind::Square;
  double side = 0.10;
  double segment_time = 5.0;
  Vec3 first_direction = Vec3::UnitZ();
  Vec3 second_direction = Vec3::UnitY();
  Vec3 hold_offset = Vec3::Zero();

  InteractionMode mode = InteractionMode::Contact;
  bool human_enabled = true;
  HumanArmParams human;
  WallParams wall;          // wall.position is relative to the start pose along the axis
  bool wall_on_plant = true;  // the sampled wall force also acts on the plant
  double accel_cutoff_hz = 50.0;
  EnergyRule energy_rule = EnergyRule::Held;
  double force_noise = 0.0;  // std-dev of sensor noise, N and N m

  double duration = 0.0;     // impedance phase, s; 0 picks a length from the path
  double dt = 1e-3;
  int substeps = 1;

  VecX q_start;              // empty: model default
  double q_spread = 0.2;     // half-width of the random initial draw, rad
  double calibration_tolerance = 1e-3;
  double calibration_timeout = 15.0;
  double calibration_settle_velocity = 1e-2;
  double param_error = 0.3;  // relative half-width of the initial estimate error
  std::uint64_t seed = 1;

  double qd_limit = 20.0;      // rad/s
  double error_limit = 0.25;   // m
  double force_limit = 1e4;    // N, on |f_c|
  bool diagnostics = true;
  bool record = true;          // keep per-tick rows
  bool log_calibration = true;

  /// `duration`, or when it is 0: 4 t_f + 2 for the square, t_f + 3 for a
  /// press and 20 s for a hold.
  double impedance_duration() const;
};

/// Calibrated start configuration used when a scenario leaves q_start empty.
VecX default_start_configuration(int dof);

/// Named presets: "default", "fig5", "fig6", "fig7", "free", "regulation",
/// "zwidth". Throws ConfigError for unknown names.
Scenario preset(const std::string& name);
const std::vector<std::string>& preset_names();

}  // namespace vdc
