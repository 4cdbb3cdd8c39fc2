#include "vdc/scenario.hpp"

#include "vdc/errors.hpp"

namespace vdc {

double Scenario::impedance_duration() const {
  if (duration > 0.0) return duration;
  switch (path) {
    case PathKind::Square: return 4.0 * segment_time + 2.0;
    case PathKind::Press: return segment_time + 3.0;
    case PathKind::Hold: return 20.0;
  }
  return 20.0;
}

VecX default_start_configuration(int dof) {
  VecX q = VecX::Zero(dof);
  const double ref[] = {0.1, 0.5, 0.1, 1.2, 0.1, -0.4, 0.1};
  for (int k = 0; k < dof && k < 7; ++k) q[k] = ref[k];
  return q;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"default", "fig5", "fig6", "fig7",
                                                 "free", "regulation", "zwidth"};
  return names;
}

Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  s.model = std::make_shared<const RobotModel>(RobotModel::default_arm());

  // Wall 7 cm above the start, crossed by the first (+z) edge of the square.
  auto contact = [&](double t_f, double k_e) {
    s.path = PathKind::Square;
    s.segment_time = t_f;
    s.mode = InteractionMode::Contact;
    s.human_enabled = true;
    s.wall.enabled = true;
    s.wall.position = 0.07;
    s.wall.stiffness = k_e;
    s.wall.element = WallElement::VaryingMass;
    s.wall.mass = 0.14;
  };

  if (name == "default" || name == "fig5") {
    contact(5.0, 1000.0);
  } else if (name == "fig6") {
    contact(2.0, 1000.0);
  } else if (name == "fig7") {
    contact(2.0, 1500.0);
  } else if (name == "free" || name == "regulation") {
    s.path = PathKind::Hold;
    s.hold_offset = Vec3(0.0, 0.03, 0.03);
    s.mode = InteractionMode::Assist;
    s.human_enabled = false;
    s.wall.enabled = false;
  } else if (name == "zwidth") {
    // One press into the wall at t_f = 5 s, then hold; stiffness and element
    // are filled in per sweep point.
    s.path = PathKind::Press;
    s.segment_time = 5.0;
    s.mode = InteractionMode::Contact;
    s.human_enabled = true;
    s.wall.enabled = true;
    s.wall.position = 0.07;
    s.diagnostics = false;
    s.record = false;
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  return s;
}

}  // namespace vdc
