// Small dense tensor algebra for isotropic continuum mechanics.
//
// Voigt ordering is (xx, yy, zz, yz, xz, xy). Strain-like tensors store
// engineering shear (gamma = 2 eps_ij) in the last three slots, stress-like
// tensors store the tensor components directly. With that convention the
// 6x6 Hooke matrix maps strain Voigt vectors to stress Voigt vectors and the
// plain dot product of a stress vector with a strain vector is sigma:eps.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace latinpgd {

enum class Flavor { strain, stress };

template <typename Scalar>
using Voigt6 = Eigen::Matrix<Scalar, 6, 1>;

template <typename Scalar>
class SymTensor2 {
 public:
  using Vector = Voigt6<Scalar>;
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

  SymTensor2() : v_(Vector::Zero()), flavor_(Flavor::strain) {}
  SymTensor2(const Vector& voigt, Flavor flavor) : v_(voigt), flavor_(flavor) {}

  static SymTensor2 strain(const Vector& voigt) { return {voigt, Flavor::strain}; }
  static SymTensor2 stress(const Vector& voigt) { return {voigt, Flavor::stress}; }
  static SymTensor2 zero(Flavor flavor) { return {Vector::Zero(), flavor}; }

  static SymTensor2 from_matrix(const Matrix3& m, Flavor flavor) {
    const Scalar f = flavor == Flavor::strain ? Scalar(2) : Scalar(1);
    Vector v;
    v << m(0, 0), m(1, 1), m(2, 2), f * Scalar(0.5) * (m(1, 2) + m(2, 1)),
        f * Scalar(0.5) * (m(0, 2) + m(2, 0)), f * Scalar(0.5) * (m(0, 1) + m(1, 0));
    return {v, flavor};
  }

  Matrix3 matrix() const {
    const Scalar f = shear_factor();
    Matrix3 m;
    m << v_[0], f * v_[5], f * v_[4],  //
        f * v_[5], v_[1], f * v_[3],   //
        f * v_[4], f * v_[3], v_[2];
    return m;
  }

  const Vector& voigt() const { return v_; }
  Vector& voigt() { return v_; }
  Flavor flavor() const { return flavor_; }

  Scalar trace() const { return v_[0] + v_[1] + v_[2]; }

  /// Full double contraction a:b, whatever the flavors of the operands.
  Scalar contract(const SymTensor2& other) const {
    const Scalar shear = shear_factor() * other.shear_factor();
    return v_.template head<3>().dot(other.v_.template head<3>()) +
           Scalar(2) * shear * v_.template tail<3>().dot(other.v_.template tail<3>());
  }

  Scalar norm() const { using std::sqrt; return sqrt(contract(*this)); }

  bool all_finite() const { return v_.allFinite(); }

  SymTensor2 operator+(const SymTensor2& o) const { check_same(o); return {v_ + o.v_, flavor_}; }
  SymTensor2 operator-(const SymTensor2& o) const { check_same(o); return {v_ - o.v_, flavor_}; }
  SymTensor2 operator-() const { return {-v_, flavor_}; }
  SymTensor2 operator*(Scalar s) const { return {s * v_, flavor_}; }
  friend SymTensor2 operator*(Scalar s, const SymTensor2& t) { return t * s; }

 private:
  Scalar shear_factor() const { return flavor_ == Flavor::strain ? Scalar(0.5) : Scalar(1); }
  void check_same(const SymTensor2& o) const {
    if (o.flavor_ != flavor_) throw std::invalid_argument("SymTensor2: mixed strain/stress flavors");
  }

  Vector v_;
  Flavor flavor_;
};

/// Isotropic elasticity operator in the strain(engineering)->stress Voigt map.
template <typename Scalar>
class HookeTensor {
 public:
  using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;

  HookeTensor(Scalar young, Scalar poisson) : young_(young), poisson_(poisson) {
    if (!(young > Scalar(0))) throw std::invalid_argument("hooke_tensor: Young's modulus must be positive");
    if (!(poisson >= Scalar(0))) throw std::invalid_argument("hooke_tensor: Poisson ratio must be >= 0");
    if (!(poisson < Scalar(0.5))) throw std::invalid_argument("hooke_tensor: Poisson ratio >= 0.5 (incompressible) rejected");
    const Scalar lame = lame_lambda();
    const Scalar shear = lame_mu();
    stiffness_.setZero();
    stiffness_.template topLeftCorner<3, 3>().setConstant(lame);
    for (int i = 0; i < 3; ++i) {
      stiffness_(i, i) += Scalar(2) * shear;
      stiffness_(i + 3, i + 3) = shear;
    }
    compliance_.setZero();
    compliance_.template topLeftCorner<3, 3>().setConstant(-poisson / young);
    for (int i = 0; i < 3; ++i) {
      compliance_(i, i) = Scalar(1) / young;
      compliance_(i + 3, i + 3) = Scalar(1) / shear;
    }
  }

  Scalar young() const { return young_; }
  Scalar poisson() const { return poisson_; }
  Scalar lame_lambda() const {
    return young_ * poisson_ / ((Scalar(1) + poisson_) * (Scalar(1) - Scalar(2) * poisson_));
  }
  Scalar lame_mu() const { return young_ / (Scalar(2) * (Scalar(1) + poisson_)); }

  const Matrix6& stiffness() const { return stiffness_; }
  const Matrix6& compliance() const { return compliance_; }

  SymTensor2<Scalar> apply(const SymTensor2<Scalar>& strain) const {
    if (strain.flavor() != Flavor::strain) throw std::invalid_argument("HookeTensor::apply expects a strain");
    return SymTensor2<Scalar>::stress(stiffness_ * strain.voigt());
  }
  SymTensor2<Scalar> apply_inverse(const SymTensor2<Scalar>& stress) const {
    if (stress.flavor() != Flavor::stress) throw std::invalid_argument("HookeTensor::apply_inverse expects a stress");
    return SymTensor2<Scalar>::strain(compliance_ * stress.voigt());
  }

 private:
  Scalar young_;
  Scalar poisson_;
  Matrix6 stiffness_;
  Matrix6 compliance_;
};

template <typename Scalar>
HookeTensor<Scalar> hooke_tensor(Scalar young, Scalar poisson) {
  return HookeTensor<Scalar>(young, poisson);
}

/// a:C:b for two strains, a:C^-1:b for two stresses.
template <typename Scalar>
Scalar energy_contract(const SymTensor2<Scalar>& a, const HookeTensor<Scalar>& c, const SymTensor2<Scalar>& b) {
  if (a.flavor() != b.flavor()) throw std::invalid_argument("energy_contract: inconsistent flavors");
  if (a.flavor() == Flavor::strain) return a.voigt().dot(c.stiffness() * b.voigt());
  return a.voigt().dot(c.compliance() * b.voigt());
}

template <typename Scalar>
struct SymEigen3 {
  std::array<Scalar, 3> values;          // descending
  Eigen::Matrix<Scalar, 3, 3> vectors;   // columns, orthonormal
};

namespace detail {

// Cyclic Jacobi sweeps on a symmetric 3x3; used to polish the closed-form
// eigenvectors. Converges quadratically once the input is nearly diagonal.
template <typename Scalar>
void jacobi_polish(Eigen::Matrix<Scalar, 3, 3>& a, Eigen::Matrix<Scalar, 3, 3>& v, int max_sweeps) {
  using std::abs;
  using std::sqrt;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Scalar off = abs(a(0, 1)) + abs(a(0, 2)) + abs(a(1, 2));
    const Scalar diag = abs(a(0, 0)) + abs(a(1, 1)) + abs(a(2, 2));
    if (off <= std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2) * diag || off == Scalar(0)) return;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
        const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) / (abs(theta) + sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        Eigen::Matrix<Scalar, 3, 3> rot = Eigen::Matrix<Scalar, 3, 3>::Identity();
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        a = rot.transpose() * a * rot;
        a(p, q) = a(q, p) = Scalar(0);
        v = v * rot;
      }
    }
  }
}

}  // namespace detail

/// Eigen-decomposition of a symmetric 3x3 tensor (tensor components, not
/// Voigt). Closed form followed by Jacobi polish; eigenvalues descending,
/// ties broken by the sign convention "first non-negligible component > 0".
template <typename Scalar>
SymEigen3<Scalar> eig_sym3(const SymTensor2<Scalar>& t) {
  if (!t.all_finite()) throw std::invalid_argument("eig_sym3: non-finite tensor");
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
  const Matrix3 m = t.matrix();
  SymEigen3<Scalar> out;
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) {
    out.values = {Scalar(0), Scalar(0), Scalar(0)};
    out.vectors = Matrix3::Identity();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix3> direct;
  direct.computeDirect(m / scale);
  Matrix3 v = direct.eigenvectors();
  // Re-orthonormalize before polishing; the closed form can lose orthogonality
  // for clustered spectra.
  Eigen::HouseholderQR<Matrix3> qr(v);
  v = qr.householderQ();
  Matrix3 a = v.transpose() * (m / scale) * v;
  detail::jacobi_polish(a, v, 8);

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
  for (int k = 0; k < 3; ++k) {
    out.values[k] = a(order[k], order[k]) * scale;
    Eigen::Matrix<Scalar, 3, 1> col = v.col(order[k]);
    for (int i = 0; i < 3; ++i) {
      using std::abs;
      if (abs(col[i]) > Scalar(1e-12)) {
        if (col[i] < Scalar(0)) col = -col;
        break;
      }
    }
    out.vectors.col(k) = col;
  }
  return out;
}

/// Positive part <t>_+ = sum max(l_i, 0) v_i (x) v_i, same flavor as t.
template <typename Scalar>
SymTensor2<Scalar> macaulay_positive(const SymTensor2<Scalar>& t) {
  const auto e = eig_sym3(t);
  if (e.values[2] >= Scalar(0)) return t;
  if (e.values[0] <= Scalar(0)) return SymTensor2<Scalar>::zero(t.flavor());
  Eigen::Matrix<Scalar, 3, 3> m = Eigen::Matrix<Scalar, 3, 3>::Zero();
  for (int k = 0; k < 3; ++k) {
    if (e.values[k] > Scalar(0)) m += e.values[k] * e.vectors.col(k) * e.vectors.col(k).transpose();
  }
  return SymTensor2<Scalar>::from_matrix(m, t.flavor());
}

using SymTensor = SymTensor2<double>;
using Hooke = HookeTensor<double>;
using Vector6 = Voigt6<double>;

}  // namespace latinpgd
