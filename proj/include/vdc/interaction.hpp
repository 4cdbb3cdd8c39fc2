#pragma once

// External forces on the end-effector: a human arm coupled through a spring
// and damper, and a planar virtual wall rendered through the force input.

#include "vdc/spatial.hpp"

namespace vdc {

using Diag6 = Eigen::Matrix<double, 6, 1>;

struct HumanArmParams {
  Diag6 mass = (Diag6() << 1.5, 1.5, 1.5, 0.015, 0.015, 0.015).finished();
  Diag6 damping = (Diag6() << 15, 15, 15, 0.15, 0.15, 0.15).finished();
  Diag6 stiffness = (Diag6() << 150, 150, 150, 1.5, 1.5, 1.5).finished();
};

/// Arm state in task coordinates: position plus rotation vector of the hand
/// relative to a fixed reference orientation.
class HumanArm {
 public:
  HumanArm() = default;
  HumanArm(const HumanArmParams& p, const Vec6& x0);

  /// Coupling force K_h (X_h - X): the arm's reaction on the robot handle.
  Vec6 force(const Vec6& x) const;

  /// Semi-implicit Euler step of M_h Xdd_h + B_h Xd_h + K_h (X_h - X) = 0.
  void step(const Vec6& x, double dt);

  const Vec6& position() const { return x_h_; }
  const Vec6& velocity() const { return xd_h_; }
  const HumanArmParams& params() const { return p_; }

 private:
  HumanArmParams p_;
  Vec6 x_h_ = Vec6::Zero();
  Vec6 xd_h_ = Vec6::Zero();
};

enum class WallElement { None, VaryingMass, Damping };

struct WallParams {
  bool enabled = false;
  double position = 0.0;   // z_e along the axis, m
  double stiffness = 0.0;  // k_e, N/m
  WallElement element = WallElement::None;
  double mass = 0.0;       // m_d, kg
  double damping = 0.0;    // b_e, N s/m
  Vec3 axis = Vec3::UnitZ();  // unit normal pointing into the wall
};

/// m_e = m_d when a v >= 0, else 0.
double varying_mass_gate(double a, double v, double m_d);

/// Penetration of `s` (end-effector coordinate along the axis) past the wall.
inline double penetration(const WallParams& w, double s) { return s - w.position; }

/// Wall force along the axis (robot on wall). Zero out of contact.
double contact_force(const WallParams& w, double s, double v, double a);

enum class InteractionMode { Assist, Contact };

/// f = -f_h (assist) or f = -f_h + f_c axis (contact); ground axes.
Vec6 compose_external_force(const Vec6& f_h, double f_c, const Vec3& axis, InteractionMode mode);

/// Rectangle (or trapezoid, when `prev_power` is given) accumulation of f_c v.
double passivity_energy_step(double e_c, double f_c, double v, double dt);
double passivity_energy_step_trapezoid(double e_c, double prev_power, double power, double dt);

/// First-order low-pass on a backward difference. Shared by the acceleration
/// estimate of the wall and the required joint acceleration of the controller.
template <typename T>
class FilteredDerivative {
 public:
  FilteredDerivative() = default;
  FilteredDerivative(double cutoff_hz, double dt) { configure(cutoff_hz, dt); }
  void configure(double cutoff_hz, double dt) {
    dt_ = dt;
    alpha_ = cutoff_hz > 0.0 ? dt / (dt + 1.0 / (2.0 * 3.14159265358979323846 * cutoff_hz)) : 1.0;
    primed_ = false;
  }
  const T& update(const T& x) {
    if (!primed_) {
      prev_ = x;
      out_ = x - x;  // zero of the right shape
      primed_ = true;
      return out_;
    }
    const T raw = (x - prev_) / dt_;
    out_ = out_ + alpha_ * (raw - out_);
    prev_ = x;
    return out_;
  }
  const T& value() const { return out_; }
  void reset() { primed_ = false; }

 private:
  double dt_ = 1e-3;
  double alpha_ = 1.0;
  bool primed_ = false;
  T prev_{};
  T out_{};
};

struct ContactState {
  double penetration = 0.0;
  double v = 0.0;
  double a = 0.0;
  double effective_mass = 0.0;
  double force = 0.0;
  double energy = 0.0;
  double min_energy = 0.0;
  bool in_contact = false;
};

/// How E_c is accumulated. Sampled and Trapezoid use the tick-rate f_c and v;
/// Held integrates the force held over the tick against the plant's actual
/// displacement, i.e. the work the sampled wall really does.
enum class EnergyRule { Sampled, Trapezoid, Held };

/// Wall evaluated once per control tick from the sampled end-effector state.
class WallMonitor {
 public:
  WallMonitor() = default;
  WallMonitor(const WallParams& w, double dt, double accel_cutoff_hz, EnergyRule rule);
  const ContactState& update(const Vec3& position, const Vec3& velocity);
  /// Held rule: adds the held force times a plant displacement along the axis.
  void add_held_work(double displacement);
  EnergyRule rule() const { return rule_; }
  const ContactState& state() const { return s_; }
  const WallParams& params() const { return w_; }

 private:
  WallParams w_;
  double dt_ = 1e-3;
  EnergyRule rule_ = EnergyRule::Sampled;
  double prev_power_ = 0.0;
  FilteredDerivative<double> accel_;
  ContactState s_;
};

}  // namespace vdc
