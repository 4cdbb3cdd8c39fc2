#include "vdc/interaction.hpp"

namespace vdc {

HumanArm::HumanArm(const HumanArmParams& p, const Vec6& x0) : p_(p), x_h_(x0) {
  if ((p.mass.array() <= 0.0).any() || (p.damping.array() < 0.0).any() ||
      (p.stiffness.array() < 0.0).any()) {
    throw std::invalid_argument("HumanArm: mass must be positive, damping and stiffness non-negative");
  }
}

Vec6 HumanArm::force(const Vec6& x) const { return p_.stiffness.cwiseProduct(x_h_ - x); }

void HumanArm::step(const Vec6& x, double dt) {
  const Vec6 acc =
      (-p_.damping.cwiseProduct(xd_h_) - p_.stiffness.cwiseProduct(x_h_ - x)).cwiseQuotient(p_.mass);
  xd_h_ += dt * acc;
  x_h_ += dt * xd_h_;
}

double varying_mass_gate(double a, double v, double m_d) { return a * v >= 0.0 ? m_d : 0.0; }

double contact_force(const WallParams& w, double s, double v, double a) {
  const double pen = penetration(w, s);
  if (!w.enabled || pen <= 0.0) return 0.0;
  double f = w.stiffness * pen;
  switch (w.element) {
    case WallElement::VaryingMass: f += varying_mass_gate(a, v, w.mass) * a; break;
    case WallElement::Damping: f += w.damping * v; break;
    case WallElement::None: break;
  }
  return f;
}

Vec6 compose_external_force(const Vec6& f_h, double f_c, const Vec3& axis, InteractionMode mode) {
  Vec6 f = -f_h;
  if (mode == InteractionMode::Contact) f.head<3>() += f_c * axis;
  return f;
}

double passivity_energy_step(double e_c, double f_c, double v, double dt) { return e_c + f_c * v * dt; }

double passivity_energy_step_trapezoid(double e_c, double prev_power, double power, double dt) {
  return e_c + 0.5 * (prev_power + power) * dt;
}

WallMonitor::WallMonitor(const WallParams& w, double dt, double accel_cutoff_hz, EnergyRule rule)
    : w_(w), dt_(dt), rule_(rule), accel_(accel_cutoff_hz, dt) {
  if (w.stiffness < 0.0 || w.mass < 0.0 || w.damping < 0.0) {
    throw std::invalid_argument("WallParams: stiffness, mass and damping must be non-negative");
  }
  if (std::abs(w.axis.norm() - 1.0) > 1e-9) throw std::invalid_argument("WallParams: axis must be a unit vector");
}

const ContactState& WallMonitor::update(const Vec3& position, const Vec3& velocity) {
  s_.v = w_.axis.dot(velocity);
  s_.a = accel_.update(s_.v);
  s_.penetration = penetration(w_, w_.axis.dot(position));
  s_.in_contact = w_.enabled && s_.penetration > 0.0;
  s_.effective_mass = s_.in_contact && w_.element == WallElement::VaryingMass
                          ? varying_mass_gate(s_.a, s_.v, w_.mass)
                          : 0.0;
  s_.force = contact_force(w_, w_.axis.dot(position), s_.v, s_.a);
  const double power = s_.force * s_.v;
  if (rule_ == EnergyRule::Trapezoid) {
    s_.energy = passivity_energy_step_trapezoid(s_.energy, prev_power_, power, dt_);
  } else if (rule_ == EnergyRule::Sampled) {
    s_.energy = passivity_energy_step(s_.energy, s_.force, s_.v, dt_);
  }
  prev_power_ = power;
  s_.min_energy = std::min(s_.min_energy, s_.energy);
  return s_;
}

void WallMonitor::add_held_work(double displacement) {
  if (rule_ != EnergyRule::Held) return;
  s_.energy += s_.force * displacement;
  s_.min_energy = std::min(s_.min_energy, s_.energy);
}

}  // namespace vdc
