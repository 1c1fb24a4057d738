// Space-time fields sampled at (spatial Gauss point x temporal Gauss point).
//
// Tensor fields are (6 n_gauss) x n_time matrices: rows 6g..6g+5 hold the
// Voigt components at spatial point g, one column per temporal sample.
// Scalar fields are n_gauss x n_time.
#pragma once

#include "latinpgd/tensor.hpp"

#include <Eigen/Dense>

namespace latinpgd {

using FieldST = Eigen::MatrixXd;

/// Quadrature weights of the space-time grid.
struct SpaceTimeQuadrature {
  Eigen::VectorXd space;  // n_gauss
  Eigen::VectorXd time;   // n_time

  int num_space() const { return static_cast<int>(space.size()); }
  int num_time() const { return static_cast<int>(time.size()); }
};

/// Integral of x:x over space and time (engineering shear handled per flavor).
double st_norm2(const FieldST& x, Flavor flavor, const SpaceTimeQuadrature& q);

/// Integral of x:C^-1:x over space and time for a stress-like field.
double st_compliance_energy(const FieldST& x, const Hooke& hooke, const SpaceTimeQuadrature& q);

/// Spatial integral of a:b for two tensor columns (6 n_gauss vectors); plain
/// Voigt dot, i.e. one stress-like and one strain-like operand.
double space_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w_space);

/// Spatial integral of a:a for one tensor column.
double space_norm2(const Eigen::VectorXd& a, Flavor flavor, const Eigen::VectorXd& w_space);

/// Applies a 6x6 operator to every spatial point of a tensor column or field.
FieldST apply_pointwise(const Eigen::Matrix<double, 6, 6>& op, const FieldST& x);

/// Multiplies each 6-row block of a tensor column/field by the matching
/// spatial weight.
FieldST weight_space(const FieldST& x, const Eigen::VectorXd& w_space);

}  // namespace latinpgd
