#pragma once

// Scenario configuration files, command-line overrides and robot
// description files. Every accepted key is listed in one table, which also
// drives `describe`.

#include "vdc/experiments.hpp"
#include "vdc/scenario.hpp"

#include <json.hpp>

#include <string>

namespace vdc {

inline constexpr const char* kConfigSchema = "vdcbench.config/1";
inline constexpr const char* kRobotSchema = "vdcbench.robot/1";

struct Config {
  Scenario scenario;
  ZWidthSpec zwidth;  // zwidth.base is filled from `scenario` by finalize()
};

/// Preset values before any file or override is applied.
Config default_config(const std::string& preset_name);

/// Parses a config document. The optional "preset" key picks the starting
/// values (else `fallback_preset`); every other key overwrites one field.
/// Errors carry "origin:line:col" for syntax and a JSON pointer otherwise.
Config parse_config(const std::string& text, const std::string& origin,
                    const std::string& fallback_preset);
Config load_config(const std::string& path, const std::string& fallback_preset);

/// Applies "dotted.key=value". The value is read as JSON when it parses,
/// else as a string, so wall.k_e=1500 and path.kind=press both work.
void apply_override(Config& c, const std::string& assignment);

/// Validates every field, loads the robot file (relative paths resolve
/// against `base_dir`) and copies the scenario into the sweep template.
void finalize(Config& c, const std::string& base_dir);

/// Effective values under the same keys a config file uses.
nlohmann::ordered_json config_to_json(const Config& c);
/// Every key with its type, default (from the "default" preset) and meaning.
nlohmann::ordered_json describe_schema();

RobotModel parse_robot(const std::string& text, const std::string& origin);
RobotModel load_robot(const std::string& path);
nlohmann::ordered_json robot_to_json(const RobotModel& model);

}  // namespace vdc
