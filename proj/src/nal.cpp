#include "vdc/nal.hpp"

#include "vdc/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <array>
#include <cmath>
#include <string>

namespace vdc {

namespace {

// Index pairs of the upper triangle of a symmetric 4x4, used to pack S.
constexpr std::array<std::pair<int, int>, 10> kUpper = {{
    {0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

using Mat10 = Eigen::Matrix<double, 10, 10>;

// Row k: coefficients of the packed S entries in tr(nal_map(e_k) S).
Mat10 dual_basis_inverse() {
  Mat10 a;
  for (int k = 0; k < 10; ++k) {
    const Mat4 f = nal_map(InertialParams(Vec10::Unit(k))).matrix();
    for (int u = 0; u < 10; ++u) {
      const auto [i, j] = kUpper[u];
      a(k, u) = i == j ? f(i, j) : 2.0 * f(i, j);
    }
  }
  return a.fullPivLu().inverse();
}

}  // namespace

InertialParams::InertialParams(double mass, const Vec3& first_moment, const Mat3& inertia) {
  phi_ << mass, first_moment, inertia(0, 0), inertia(1, 1), inertia(2, 2), inertia(0, 1),
      inertia(1, 2), inertia(0, 2);
}

InertialParams InertialParams::from_com(double mass, const Vec3& com, const Mat3& inertia_at_com) {
  // Parallel-axis shift to the frame origin.
  const Mat3 shifted = inertia_at_com + mass * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
  return InertialParams(mass, mass * com, shifted);
}

Mat3 InertialParams::inertia() const {
  Mat3 i;
  i << phi_[4], phi_[7], phi_[9],
       phi_[7], phi_[5], phi_[8],
       phi_[9], phi_[8], phi_[6];
  return i;
}

LMatrix::LMatrix(const Mat4& m) : m_(m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("LMatrix: input is not symmetric");
  }
}

double LMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

bool LMatrix::positive_definite(double eps) const {
  Eigen::LLT<Mat4> llt(m_ - eps * Mat4::Identity());
  return llt.info() == Eigen::Success;
}

LMatrix nal_map(const InertialParams& phi) {
  const Mat3 inertia = phi.inertia();
  Mat4 l;
  l.topLeftCorner<3, 3>() = 0.5 * inertia.trace() * Mat3::Identity() - inertia;
  l.topRightCorner<3, 1>() = phi.first_moment();
  l.bottomLeftCorner<1, 3>() = phi.first_moment().transpose();
  l(3, 3) = phi.mass();
  return LMatrix(l);
}

InertialParams nal_unmap(const LMatrix& l) {
  const Mat4& m = l.matrix();
  const Mat3 sigma = m.topLeftCorner<3, 3>();
  return InertialParams(m(3, 3), m.topRightCorner<3, 1>(), sigma.trace() * Mat3::Identity() - sigma);
}

Mat4 dual_s_matrix(const Vec10& s) {
  static const Mat10 inverse = dual_basis_inverse();
  const Vec10 packed = inverse * s;
  Mat4 out;
  for (int u = 0; u < 10; ++u) {
    const auto [i, j] = kUpper[u];
    out(i, j) = packed[u];
    out(j, i) = packed[u];
  }
  return out;
}

NalStep nal_update(const LMatrix& l_hat, const Mat4& s, double gamma, double dt, int max_halvings) {
  if (!(gamma > 0.0) || !(dt > 0.0)) throw std::invalid_argument("nal_update: gamma and dt must be positive");
  const Mat4& l = l_hat.matrix();
  Mat4 rate = l * s * l / gamma;
  rate = 0.5 * (rate + rate.transpose()).eval();
  double h = dt;
  for (int k = 0; k <= max_halvings; ++k) {
    LMatrix next(Mat4(l + h * rate));
    if (next.positive_definite(kPdFloor)) return {next, h, k};
    h *= 0.5;
  }
  throw NumericalFault("nal_update: estimate lost positive definiteness after " +
                       std::to_string(max_halvings) + " step halvings (dt too large)");
}

double bregman_divergence(const LMatrix& l_true, const LMatrix& l_hat) {
  Eigen::LLT<Mat4> chol_true(l_true.matrix());
  Eigen::LLT<Mat4> chol_hat(l_hat.matrix());
  if (chol_true.info() != Eigen::Success || chol_hat.info() != Eigen::Success) {
    throw std::invalid_argument("bregman_divergence: arguments must be positive definite");
  }
  const Mat4 lt = chol_true.matrixL();
  const Mat4 lh = chol_hat.matrixL();
  const double log_det_true = 2.0 * lt.diagonal().array().log().sum();
  const double log_det_hat = 2.0 * lh.diagonal().array().log().sum();
  const double trace = chol_hat.solve(l_true.matrix()).trace();
  return log_det_hat - log_det_true + trace - 4.0;
}

double bregman_rate(const LMatrix& l_true, const LMatrix& l_hat, const Mat4& l_hat_dot) {
  Eigen::LLT<Mat4> chol_hat(l_hat.matrix());
  if (chol_hat.info() != Eigen::Success) {
    throw std::invalid_argument("bregman_rate: estimate must be positive definite");
  }
  const Mat4 a = chol_hat.solve(l_hat_dot);           // L^-1 Ldot
  const Mat4 b = chol_hat.solve(a.transpose()).transpose();  // L^-1 Ldot L^-1
  return (b * (l_hat.matrix() - l_true.matrix())).trace();
}

LMatrix project_positive_definite(const Mat4& m, double floor) {
  const Mat4 sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat4> es(sym);
  const Eigen::Vector4d clamped = es.eigenvalues().cwiseMax(floor);
  Mat4 out = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  return LMatrix(Mat4(0.5 * (out + out.transpose())));
}

}  // namespace vdc
