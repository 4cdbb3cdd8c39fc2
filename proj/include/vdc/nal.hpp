#pragma once

// Natural adaptation on the 4x4 pseudo-inertia image of the inertial
// parameter vector phi = [m, h, Ixx, Iyy, Izz, Ixy, Iyz, Ixz].

#include "vdc/spatial.hpp"

#include <Eigen/Core>

#include <vector>

namespace vdc {

using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat4 = Eigen::Matrix4d;

class InertialParams {
 public:
  InertialParams() : phi_(Vec10::Zero()) {}
  explicit InertialParams(const Vec10& phi) : phi_(phi) {}
  /// `inertia` is the rotational inertia about the frame origin.
  InertialParams(double mass, const Vec3& first_moment, const Mat3& inertia);
  /// Mass, centre of mass and inertia about the centre of mass, all in the body frame.
  static InertialParams from_com(double mass, const Vec3& com, const Mat3& inertia_at_com);

  double mass() const { return phi_[0]; }
  Vec3 first_moment() const { return phi_.segment<3>(1); }
  /// Symmetric rotational inertia about the frame origin.
  Mat3 inertia() const;
  const Vec10& vector() const { return phi_; }
  bool finite() const { return phi_.allFinite(); }

 private:
  Vec10 phi_;
};

class LMatrix {
 public:
  LMatrix() : m_(Mat4::Zero()) {}
  /// Throws std::invalid_argument unless `m` is symmetric to 1e-12 (relative).
  explicit LMatrix(const Mat4& m);
  const Mat4& matrix() const { return m_; }
  double min_eigenvalue() const;
  bool positive_definite(double eps = 0.0) const;

 private:
  Mat4 m_;
};

LMatrix nal_map(const InertialParams& phi);
InertialParams nal_unmap(const LMatrix& l);

/// Unique symmetric S with tr(nal_map(p) S) == p^T s for every p.
Mat4 dual_s_matrix(const Vec10& s);

/// s = W^T e for a rigid body (W is 6x10) or an actuator (1x10, scalar e).
template <int Rows>
Mat4 dual_s_matrix(const Eigen::Matrix<double, Rows, 10>& w,
                   const Eigen::Matrix<double, Rows, 1>& e) {
  return dual_s_matrix(Vec10(w.transpose() * e));
}

struct NalStep {
  LMatrix next;
  double effective_dt = 0.0;
  int halvings = 0;
};

/// Smallest eigenvalue an estimate may reach before a step is halved.
inline constexpr double kPdFloor = 1e-9;

/// Explicit Euler step of L' = (1/gamma) L S L. The step is halved until the
/// result keeps min-eig > kPdFloor; throws NumericalFault after `max_halvings`.
NalStep nal_update(const LMatrix& l_hat, const Mat4& s, double gamma, double dt,
                   int max_halvings = 30);

/// Log-det Bregman divergence D(L || L_hat) = log(|L_hat|/|L|) + tr(L_hat^-1 L) - 4.
/// Throws std::invalid_argument when either argument is not positive definite.
double bregman_divergence(const LMatrix& l_true, const LMatrix& l_hat);

/// tr(L_hat^-1 Ldot L_hat^-1 (L_hat - L)): time derivative of the divergence
/// along a trajectory of L_hat with velocity `l_hat_dot`.
double bregman_rate(const LMatrix& l_true, const LMatrix& l_hat, const Mat4& l_hat_dot);

/// Symmetric eigenvalue clamp: the nearest matrix with min-eig >= floor.
LMatrix project_positive_definite(const Mat4& m, double floor);

struct AdaptationState {
  std::vector<LMatrix> bodies;
  std::vector<LMatrix> actuators;
  double gamma = 10.0;
};

}  // namespace vdc
