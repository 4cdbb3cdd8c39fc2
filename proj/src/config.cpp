#include "vdc/config.hpp"

#include "vdc/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace vdc {

using json = nlohmann::ordered_json;

namespace {

// ---- value readers ---------------------------------------------------------

std::string type_name(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

[[noreturn]] void bad_type(const std::string& where, const std::string& expected, const json& j) {
  throw ConfigError(where, "expected " + expected + ", got " + type_name(j));
}

double read_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad_type(where, "a number", j);
  return j.get<double>();
}

bool read_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) bad_type(where, "true or false", j);
  return j.get<bool>();
}

std::string read_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad_type(where, "a string", j);
  return j.get<std::string>();
}

std::int64_t read_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad_type(where, "an integer", j);
  return j.get<std::int64_t>();
}

VecX read_vector(const json& j, const std::string& where, int size) {
  if (!j.is_array() || (size >= 0 && static_cast<int>(j.size()) != size)) {
    bad_type(where, size >= 0 ? "an array of " + std::to_string(size) + " numbers" : "an array of numbers", j);
  }
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = read_number(j[i], where + "/" + std::to_string(i));
  return v;
}

Vec3 read_vec3(const json& j, const std::string& where) { return read_vector(j, where, 3); }
Vec6 read_vec6(const json& j, const std::string& where) { return read_vector(j, where, 6); }

// A scalar broadcasts to all six diagonal entries.
Diag6 read_diag6(const json& j, const std::string& where) {
  if (j.is_number()) return Diag6::Constant(j.get<double>());
  if (!j.is_array() || j.size() != 6) bad_type(where, "a number or an array of 6 numbers", j);
  return read_vec6(j, where);
}

template <typename E>
E read_enum(const json& j, const std::string& where, const std::vector<std::pair<std::string, E>>& names) {
  const std::string s = read_string(j, where);
  std::string options;
  for (const auto& [n, e] : names) {
    if (n == s) return e;
    options += (options.empty() ? "" : ", ") + n;
  }
  throw ConfigError(where, "unknown value '" + s + "' (one of: " + options + ")");
}

template <typename E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [n, v] : names) {
    if (v == e) return n;
  }
  return "?";
}

json to_json(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

const std::vector<std::pair<std::string, PathKind>> kPathNames = {
    {"hold", PathKind::Hold}, {"press", PathKind::Press}, {"square", PathKind::Square}};
const std::vector<std::pair<std::string, InteractionMode>> kModeNames = {
    {"assist", InteractionMode::Assist}, {"contact", InteractionMode::Contact}};
const std::vector<std::pair<std::string, WallElement>> kElementNames = {
    {"none", WallElement::None}, {"mass", WallElement::VaryingMass}, {"damping", WallElement::Damping}};
const std::vector<std::pair<std::string, EnergyRule>> kRuleNames = {
    {"sampled", EnergyRule::Sampled}, {"trapezoid", EnergyRule::Trapezoid}, {"held", EnergyRule::Held}};
const std::vector<std::pair<std::string, JointAxis>> kAxisNames = {
    {"x", JointAxis::X}, {"y", JointAxis::Y}, {"z", JointAxis::Z}};

// ---- field table -----------------------------------------------------------

struct Field {
  std::string key;   // dotted
  std::string type;
  std::string help;
  std::function<json(const Config&)> get;
  std::function<void(Config&, const json&, const std::string&)> set;
};

std::vector<Field> build_fields() {
  std::vector<Field> f;
  using S = Scenario;
  auto num = [&](std::string key, std::string help, auto member) {
    f.push_back({std::move(key), "number", std::move(help),
                 [member](const Config& c) { return json(c.scenario.*member); },
                 [member](Config& c, const json& j, const std::string& w) { c.scenario.*member = read_number(j, w); }});
  };
  auto boolean = [&](std::string key, std::string help, auto member) {
    f.push_back({std::move(key), "boolean", std::move(help),
                 [member](const Config& c) { return json(c.scenario.*member); },
                 [member](Config& c, const json& j, const std::string& w) { c.scenario.*member = read_bool(j, w); }});
  };
  // Accessor-based fields for nested members.
  auto custom = [&](std::string key, std::string type, std::string help, std::function<json(const Config&)> get,
                    std::function<void(Config&, const json&, const std::string&)> set) {
    f.push_back({std::move(key), std::move(type), std::move(help), std::move(get), std::move(set)});
  };
  auto gain_num = [&](std::string key, std::string help, double ControllerGains::*m) {
    custom(std::move(key), "number", std::move(help), [m](const Config& c) { return json(c.scenario.gains.*m); },
           [m](Config& c, const json& j, const std::string& w) { c.scenario.gains.*m = read_number(j, w); });
  };
  auto diag = [&](std::string key, std::string help, std::function<Diag6&(Scenario&)> ref) {
    custom(std::move(key), "number or [6]", std::move(help),
           [ref](const Config& c) { return to_json(ref(const_cast<Scenario&>(c.scenario))); },
           [ref](Config& c, const json& j, const std::string& w) { ref(c.scenario) = read_diag6(j, w); });
  };
  auto vec3 = [&](std::string key, std::string help, std::function<Vec3&(Scenario&)> ref) {
    custom(std::move(key), "[3]", std::move(help),
           [ref](const Config& c) { return to_json(ref(const_cast<Scenario&>(c.scenario))); },
           [ref](Config& c, const json& j, const std::string& w) { ref(c.scenario) = read_vec3(j, w); });
  };
  auto grid = [&](std::string key, std::string help, Grid ZWidthSpec::*m) {
    custom(std::move(key), "[start, stop, step]", std::move(help),
           [m](const Config& c) {
             const Grid& g = c.zwidth.*m;
             return json::array({g.start, g.stop, g.step});
           },
           [m](Config& c, const json& j, const std::string& w) {
             const VecX v = read_vector(j, w, 3);
             c.zwidth.*m = Grid{v[0], v[1], v[2]};
           });
  };

  custom("name", "string", "run name; output files are <name>.csv and <name>.json",
         [](const Config& c) { return json(c.scenario.name); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.name = read_string(j, w); });
  custom("robot_file", "string", "robot description file; empty selects the built-in arm",
         [](const Config& c) { return json(c.scenario.robot_file); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.robot_file = read_string(j, w); });
  custom("seed", "integer", "seed of the initial configuration and estimate draws",
         [](const Config& c) { return json(c.scenario.seed); },
         [](Config& c, const json& j, const std::string& w) {
           const std::int64_t v = read_integer(j, w);
           if (v < 0) throw ConfigError(w, "seed must be non-negative");
           c.scenario.seed = static_cast<std::uint64_t>(v);
         });
  custom("mode", "assist | contact", "external force composition: -f_h, or -f_h + f_c",
         [](const Config& c) { return json(enum_name(c.scenario.mode, kModeNames)); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.mode = read_enum(j, w, kModeNames); });

  diag("gains.K_D", "rigid-body velocity feedback gain, per axis",
       [](S& s) -> Diag6& { return s.gains.body_damping; });
  diag("gains.K_I", "rigid-body velocity-error integral gain, per axis",
       [](S& s) -> Diag6& { return s.gains.body_integral; });
  gain_num("gains.k_d", "joint velocity feedback gain", &ControllerGains::joint_damping);
  gain_num("gains.k_I", "joint velocity-error integral gain", &ControllerGains::joint_integral);
  gain_num("gains.gamma", "natural adaptation gain", &ControllerGains::gamma);
  gain_num("gains.integral_clamp", "magnitude clamp of each integrator entry", &ControllerGains::integral_clamp);
  gain_num("gains.qddr_cutoff_hz", "low-pass cutoff of the differentiated qd_r, Hz", &ControllerGains::qddr_cutoff_hz);
  gain_num("gains.singular_threshold", "smallest singular value before damped least squares",
           &ControllerGains::singular_threshold);
  gain_num("gains.dls_lambda", "damping of the least-squares fallback", &ControllerGains::dls_lambda);
  custom("gains.adapt", "boolean", "run the natural adaptation law",
         [](const Config& c) { return json(c.scenario.gains.adapt); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.gains.adapt = read_bool(j, w); });
  gain_num("gains.regulation_gain", "calibration law qd_r = k (q_start - q), 1/s", &ControllerGains::regulation_gain);

  diag("impedance.B_d", "desired damping, N s/m and N m s", [](S& s) -> Diag6& { return s.impedance.damping; });
  diag("impedance.K_d", "desired stiffness, N/m and N m", [](S& s) -> Diag6& { return s.impedance.stiffness; });
  custom("impedance.f_d", "[6]", "desired force on the environment",
         [](const Config& c) { return to_json(c.scenario.impedance.force); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.impedance.force = read_vec6(j, w); });

  custom("path.kind", "hold | press | square", "desired path",
         [](const Config& c) { return json(enum_name(c.scenario.path, kPathNames)); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.path = read_enum(j, w, kPathNames); });
  num("path.side", "square side length, m", &S::side);
  num("path.t_f", "duration of one square edge, s", &S::segment_time);
  vec3("path.first_direction", "unit direction of the first edge", [](S& s) -> Vec3& { return s.first_direction; });
  vec3("path.second_direction", "unit direction of the second edge", [](S& s) -> Vec3& { return s.second_direction; });
  vec3("path.hold_offset", "hold target relative to the start position, m", [](S& s) -> Vec3& { return s.hold_offset; });

  boolean("human.enabled", "couple the human arm model to the handle", &S::human_enabled);
  diag("human.M_h", "arm mass, kg and kg m^2", [](S& s) -> Diag6& { return s.human.mass; });
  diag("human.B_h", "arm damping", [](S& s) -> Diag6& { return s.human.damping; });
  diag("human.K_h", "arm stiffness", [](S& s) -> Diag6& { return s.human.stiffness; });

  custom("wall.enabled", "boolean", "render the virtual wall",
         [](const Config& c) { return json(c.scenario.wall.enabled); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.wall.enabled = read_bool(j, w); });
  custom("wall.z_e", "number", "wall position along the axis relative to the start pose, m",
         [](const Config& c) { return json(c.scenario.wall.position); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.wall.position = read_number(j, w); });
  custom("wall.k_e", "number", "wall stiffness, N/m",
         [](const Config& c) { return json(c.scenario.wall.stiffness); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.wall.stiffness = read_number(j, w); });
  custom("wall.element", "none | mass | damping", "dissipative element active in contact",
         [](const Config& c) { return json(enum_name(c.scenario.wall.element, kElementNames)); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.wall.element = read_enum(j, w, kElementNames); });
  custom("wall.m_d", "number", "varying virtual mass, kg",
         [](const Config& c) { return json(c.scenario.wall.mass); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.wall.mass = read_number(j, w); });
  custom("wall.b_e", "number", "virtual damping, N s/m",
         [](const Config& c) { return json(c.scenario.wall.damping); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.wall.damping = read_number(j, w); });
  vec3("wall.axis", "unit contact axis pointing into the wall", [](S& s) -> Vec3& { return s.wall.axis; });
  boolean("wall.on_plant", "apply the sampled wall force to the simulated robot", &S::wall_on_plant);
  num("wall.accel_cutoff_hz", "low-pass cutoff of the acceleration used by the mass element, Hz", &S::accel_cutoff_hz);
  custom("wall.energy_rule", "held | sampled | trapezoid", "accumulation of the contact energy E_c",
         [](const Config& c) { return json(enum_name(c.scenario.energy_rule, kRuleNames)); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.energy_rule = read_enum(j, w, kRuleNames); });

  num("sensor.force_noise", "standard deviation of additive force-sensor noise", &S::force_noise);

  num("sim.duration", "impedance phase length, s; 0 derives it from the path", &S::duration);
  num("sim.dt", "control period, s", &S::dt);
  custom("sim.substeps", "integer", "plant integration substeps per control period",
         [](const Config& c) { return json(c.scenario.substeps); },
         [](Config& c, const json& j, const std::string& w) {
           c.scenario.substeps = static_cast<int>(read_integer(j, w));
         });

  custom("init.q_start", "[n] or []", "calibrated start configuration, rad; [] selects the built-in one",
         [](const Config& c) { return to_json(c.scenario.q_start); },
         [](Config& c, const json& j, const std::string& w) { c.scenario.q_start = read_vector(j, w, -1); });
  num("init.q_spread", "half-width of the random initial configuration draw, rad", &S::q_spread);
  num("init.param_error", "relative half-width of the initial parameter estimate error", &S::param_error);

  num("calibration.tolerance", "joint error that ends calibration, rad", &S::calibration_tolerance);
  num("calibration.timeout", "calibration time limit, s", &S::calibration_timeout);
  num("calibration.settle_velocity", "joint rate that ends calibration, rad/s", &S::calibration_settle_velocity);

  num("limits.qd", "joint rate treated as a blow-up, rad/s", &S::qd_limit);
  num("limits.error", "position error treated as a blow-up, m", &S::error_limit);
  num("limits.force", "contact force treated as a blow-up, N", &S::force_limit);

  boolean("log.diagnostics", "evaluate the Lyapunov and VPF diagnostics each tick", &S::diagnostics);
  boolean("log.record", "keep per-tick rows for the CSV", &S::record);
  boolean("log.calibration", "include calibration ticks in the CSV", &S::log_calibration);

  grid("zwidth.damping_grid", "virtual damping values b_e, N s/m", &ZWidthSpec::damping);
  grid("zwidth.mass_grid", "varying virtual mass values m_d, kg", &ZWidthSpec::mass);
  custom("zwidth.k_max", "number", "upper end of the stiffness search, N/m",
         [](const Config& c) { return json(c.zwidth.k_max); },
         [](Config& c, const json& j, const std::string& w) { c.zwidth.k_max = read_number(j, w); });
  custom("zwidth.resolution", "number", "stiffness search resolution, N/m",
         [](const Config& c) { return json(c.zwidth.resolution); },
         [](Config& c, const json& j, const std::string& w) { c.zwidth.resolution = read_number(j, w); });
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = build_fields();
  return f;
}

const Field* find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

bool is_section(const std::string& prefix) {
  for (const Field& f : fields()) {
    if (f.key.rfind(prefix + ".", 0) == 0) return true;
  }
  return false;
}

std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

void apply_object(Config& c, const json& obj, const std::string& prefix, const std::string& pointer) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const std::string where = pointer + "/" + pointer_escape(it.key());
    if (prefix.empty() && (it.key() == "schema" || it.key() == "preset")) continue;
    if (const Field* f = find_field(key)) {
      f->set(c, it.value(), where);
    } else if (is_section(key)) {
      if (!it.value().is_object()) bad_type(where, "an object", it.value());
      apply_object(c, it.value(), key, where);
    } else {
      throw ConfigError(where, "unknown key '" + key + "'");
    }
  }
}

json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset just past the offending character.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto pos = msg.find("parse error");
    if (pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col), msg);
  }
}

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open " + what);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_schema(const json& doc, const std::string& origin, const char* expected) {
  if (!doc.is_object()) throw ConfigError(origin, "top level must be an object");
  if (doc.contains("schema")) {
    const std::string s = read_string(doc["schema"], "/schema");
    if (s != expected) throw ConfigError("/schema", "unsupported schema '" + s + "' (expected " + expected + ")");
  }
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void validate(const Config& c, int dof) {
  const Scenario& s = c.scenario;
  require(!s.name.empty() && s.name.find('/') == std::string::npos, "name", "must be a non-empty file stem");
  const ControllerGains& g = s.gains;
  require((g.body_damping.array() >= 0).all(), "gains.K_D", "must be non-negative");
  require((g.body_integral.array() >= 0).all(), "gains.K_I", "must be non-negative");
  require(g.joint_damping >= 0 && g.joint_integral >= 0, "gains.k_d", "k_d and k_I must be non-negative");
  require(g.gamma > 0, "gains.gamma", "must be positive");
  require(g.integral_clamp > 0, "gains.integral_clamp", "must be positive");
  require(g.qddr_cutoff_hz > 0, "gains.qddr_cutoff_hz", "must be positive");
  require(g.singular_threshold >= 0 && g.dls_lambda > 0, "gains.dls_lambda", "must be positive");
  require(g.regulation_gain > 0, "gains.regulation_gain", "must be positive");
  require((s.impedance.damping.array() > 0).all(), "impedance.B_d", "must be positive");
  require((s.impedance.stiffness.array() >= 0).all(), "impedance.K_d", "must be non-negative");
  require(s.side > 0, "path.side", "must be positive");
  require(s.segment_time > 0, "path.t_f", "must be positive");
  require(std::abs(s.first_direction.norm() - 1) < 1e-9, "path.first_direction", "must be a unit vector");
  require(std::abs(s.second_direction.norm() - 1) < 1e-9, "path.second_direction", "must be a unit vector");
  require((s.human.mass.array() > 0).all(), "human.M_h", "must be positive");
  require((s.human.damping.array() >= 0).all(), "human.B_h", "must be non-negative");
  require((s.human.stiffness.array() >= 0).all(), "human.K_h", "must be non-negative");
  require(s.wall.stiffness >= 0, "wall.k_e", "must be non-negative");
  require(s.wall.mass >= 0, "wall.m_d", "must be non-negative");
  require(s.wall.damping >= 0, "wall.b_e", "must be non-negative");
  require(std::abs(s.wall.axis.norm() - 1) < 1e-9, "wall.axis", "must be a unit vector");
  require(s.accel_cutoff_hz > 0, "wall.accel_cutoff_hz", "must be positive");
  require(s.force_noise >= 0, "sensor.force_noise", "must be non-negative");
  require(s.duration >= 0, "sim.duration", "must be non-negative");
  require(s.dt > 0, "sim.dt", "must be positive");
  require(s.substeps >= 1, "sim.substeps", "must be at least 1");
  require(s.q_start.size() == 0 || s.q_start.size() == dof, "init.q_start",
          "must be empty or have one entry per joint (" + std::to_string(dof) + ")");
  require(s.q_spread >= 0, "init.q_spread", "must be non-negative");
  require(s.param_error >= 0 && s.param_error < 1, "init.param_error", "must lie in [0, 1)");
  require(s.calibration_tolerance > 0 && s.calibration_timeout > 0 && s.calibration_settle_velocity > 0,
          "calibration", "tolerance, timeout and settle_velocity must be positive");
  require(s.qd_limit > 0 && s.error_limit > 0 && s.force_limit > 0, "limits", "must be positive");
  auto grid_ok = [](const Grid& gr) { return gr.step > 0 && gr.stop >= gr.start && gr.start >= 0; };
  require(grid_ok(c.zwidth.damping), "zwidth.damping_grid", "needs start >= 0, stop >= start and step > 0");
  require(grid_ok(c.zwidth.mass), "zwidth.mass_grid", "needs start >= 0, stop >= start and step > 0");
  require(c.zwidth.k_max > 0, "zwidth.k_max", "must be positive");
  require(c.zwidth.resolution > 0 && c.zwidth.resolution <= c.zwidth.k_max, "zwidth.resolution",
          "must be positive and at most k_max");
}

// ---- robot files -----------------------------------------------------------

json params_to_json(const InertialParams& p) {
  const Vec10& v = p.vector();
  return json{{"mass", v[0]},
              {"first_moment", json::array({v[1], v[2], v[3]})},
              {"inertia", json::array({v[4], v[5], v[6], v[7], v[8], v[9]})}};
}

void check_keys(const json& obj, const std::string& where, const std::vector<std::string>& allowed) {
  if (!obj.is_object()) bad_type(where, "an object", obj);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError(where + "/" + pointer_escape(it.key()), "unknown key '" + it.key() + "'");
    }
  }
  for (const std::string& k : allowed) {
    if (k != "schema" && k != "name" && !obj.contains(k)) throw ConfigError(where, "missing key '" + k + "'");
  }
}

InertialParams params_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"mass", "first_moment", "inertia"});
  Vec10 v;
  v[0] = read_number(j["mass"], where + "/mass");
  v.segment<3>(1) = read_vec3(j["first_moment"], where + "/first_moment");
  v.segment<6>(4) = read_vector(j["inertia"], where + "/inertia", 6);
  return InertialParams(v);
}

}  // namespace

// ---- public ----------------------------------------------------------------

Config default_config(const std::string& preset_name) {
  Config c;
  c.scenario = preset(preset_name);
  return c;
}

Config parse_config(const std::string& text, const std::string& origin, const std::string& fallback_preset) {
  const json doc = parse_text(text, origin);
  check_schema(doc, origin, kConfigSchema);
  std::string name = fallback_preset;
  if (doc.contains("preset")) name = read_string(doc["preset"], "/preset");
  Config c;
  try {
    c = default_config(name);
  } catch (const ConfigError&) {
    throw ConfigError(doc.contains("preset") ? "/preset" : "preset", "unknown preset '" + name + "'");
  }
  apply_object(c, doc, "", "");
  return c;
}

Config load_config(const std::string& path, const std::string& fallback_preset) {
  return parse_config(read_file(path, "config file"), path, fallback_preset);
}

void apply_override(Config& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "'", "expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  const Field* f = find_field(key);
  if (!f) throw ConfigError("override " + key, "unknown key '" + key + "'");
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  f->set(c, value, "override " + key);
}

void finalize(Config& c, const std::string& base_dir) {
  Scenario& s = c.scenario;
  if (!s.robot_file.empty()) {
    std::filesystem::path p(s.robot_file);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    s.model = std::make_shared<const RobotModel>(load_robot(p.string()));
  } else if (!s.model) {
    s.model = std::make_shared<const RobotModel>(RobotModel::default_arm());
  }
  validate(c, s.model->dof());
  c.zwidth.base = s;
}

json config_to_json(const Config& c) {
  json root;
  root["schema"] = kConfigSchema;
  for (const Field& f : fields()) {
    json* node = &root;
    std::string rest = f.key;
    for (auto dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
      node = &(*node)[rest.substr(0, dot)];
      rest = rest.substr(dot + 1);
    }
    (*node)[rest] = f.get(c);
  }
  return root;
}

json describe_schema() {
  const Config d = default_config("default");
  json out;
  out["schema"] = kConfigSchema;
  out["presets"] = preset_names();
  out["notes"] = json::array(
      {"Keys may be nested objects or dotted overrides: {\"wall\": {\"k_e\": 1500}} or wall.k_e=1500.",
       "\"preset\" selects the starting values; remaining keys overwrite them.",
       "Unknown keys are rejected."});
  json keys = json::array();
  for (const Field& f : fields()) {
    keys.push_back(json{{"key", f.key}, {"type", f.type}, {"default", f.get(d)}, {"help", f.help}});
  }
  out["keys"] = keys;
  json robot;
  robot["schema"] = kRobotSchema;
  robot["layout"] = json{
      {"gravity", "[3], m/s^2"},
      {"links", "array, base to tip; each: name, axis (x|y|z), tip_rotation [[3]x3], tip_offset [3], "
                "body {mass, first_moment [3], inertia [xx, yy, zz, xy, yz, xz] about the joint frame}, "
                "motor_inertia, actuator {same as body}, q_limits [min, max]"}};
  out["robot_file"] = robot;
  return out;
}

RobotModel parse_robot(const std::string& text, const std::string& origin) {
  const json doc = parse_text(text, origin);
  check_schema(doc, origin, kRobotSchema);
  check_keys(doc, "", {"schema", "gravity", "links"});
  const Vec3 gravity = read_vec3(doc["gravity"], "/gravity");
  const json& links = doc["links"];
  if (!links.is_array() || links.empty()) bad_type("/links", "a non-empty array", links);
  std::vector<LinkDescription> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string w = "/links/" + std::to_string(i);
    const json& l = links[i];
    check_keys(l, w, {"name", "axis", "tip_rotation", "tip_offset", "body", "motor_inertia", "actuator", "q_limits"});
    LinkDescription d;
    if (l.contains("name")) d.name = read_string(l["name"], w + "/name");
    d.axis = read_enum(l["axis"], w + "/axis", kAxisNames);
    const json& r = l["tip_rotation"];
    if (!r.is_array() || r.size() != 3) bad_type(w + "/tip_rotation", "a 3x3 array", r);
    for (int row = 0; row < 3; ++row) {
      d.tip_rotation.row(row) = read_vec3(r[row], w + "/tip_rotation/" + std::to_string(row)).transpose();
    }
    if (!is_rotation(d.tip_rotation, 1e-9)) throw ConfigError(w + "/tip_rotation", "not a rotation matrix");
    d.tip_offset = read_vec3(l["tip_offset"], w + "/tip_offset");
    d.body = params_from_json(l["body"], w + "/body");
    d.motor_inertia = read_number(l["motor_inertia"], w + "/motor_inertia");
    d.actuator = params_from_json(l["actuator"], w + "/actuator");
    const VecX lim = read_vector(l["q_limits"], w + "/q_limits", 2);
    d.q_min = lim[0];
    d.q_max = lim[1];
    out.push_back(std::move(d));
  }
  try {
    return RobotModel(std::move(out), gravity);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin, e.what());
  }
}

RobotModel load_robot(const std::string& path) { return parse_robot(read_file(path, "robot file"), path); }

json robot_to_json(const RobotModel& model) {
  json doc;
  doc["schema"] = kRobotSchema;
  doc["gravity"] = to_json(model.gravity());
  json links = json::array();
  for (const LinkDescription& l : model.links()) {
    json rot = json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(to_json(l.tip_rotation.row(r).transpose()));
    links.push_back(json{{"name", l.name},
                         {"axis", enum_name(l.axis, kAxisNames)},
                         {"tip_rotation", rot},
                         {"tip_offset", to_json(l.tip_offset)},
                         {"body", params_to_json(l.body)},
                         {"motor_inertia", l.motor_inertia},
                         {"actuator", params_to_json(l.actuator)},
                         {"q_limits", json::array({l.q_min, l.q_max})}});
  }
  doc["links"] = links;
  return doc;
}

}  // namespace vdc
