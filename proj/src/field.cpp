#include "latinpgd/field.hpp"

#include <stdexcept>

namespace latinpgd {

namespace {

Eigen::Matrix<double, 6, 1> flavor_weights(Flavor flavor) {
  const double k = flavor == Flavor::strain ? 0.5 : 2.0;
  Eigen::Matrix<double, 6, 1> f;
  f << 1, 1, 1, k, k, k;
  return f;
}

void check_shape(const FieldST& x, const SpaceTimeQuadrature& q) {
  if (x.rows() != 6 * q.num_space() || x.cols() != q.num_time())
    throw std::invalid_argument("space-time field shape does not match the quadrature");
}

}  // namespace

double st_norm2(const FieldST& x, Flavor flavor, const SpaceTimeQuadrature& q) {
  check_shape(x, q);
  const Eigen::Matrix<double, 6, 1> f = flavor_weights(flavor);
  Eigen::VectorXd row_w(x.rows());
  for (int g = 0; g < q.num_space(); ++g) row_w.segment<6>(6 * g) = q.space[g] * f;
  return (x.array().square().matrix().transpose() * row_w).dot(q.time);
}

double st_compliance_energy(const FieldST& x, const Hooke& hooke, const SpaceTimeQuadrature& q) {
  check_shape(x, q);
  const FieldST sx = apply_pointwise(hooke.compliance(), x);
  const Eigen::VectorXd per_time = weight_space(sx.cwiseProduct(x), q.space).colwise().sum().transpose();
  return per_time.dot(q.time);
}

double space_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w_space) {
  if (a.size() != b.size() || a.size() != 6 * w_space.size()) throw std::invalid_argument("space_dot: size mismatch");
  double s = 0;
  for (Eigen::Index g = 0; g < w_space.size(); ++g) s += w_space[g] * a.segment<6>(6 * g).dot(b.segment<6>(6 * g));
  return s;
}

double space_norm2(const Eigen::VectorXd& a, Flavor flavor, const Eigen::VectorXd& w_space) {
  if (a.size() != 6 * w_space.size()) throw std::invalid_argument("space_norm2: size mismatch");
  const Eigen::Matrix<double, 6, 1> f = flavor_weights(flavor);
  double s = 0;
  for (Eigen::Index g = 0; g < w_space.size(); ++g)
    s += w_space[g] * a.segment<6>(6 * g).cwiseAbs2().dot(f);
  return s;
}

FieldST apply_pointwise(const Eigen::Matrix<double, 6, 6>& op, const FieldST& x) {
  if (x.rows() % 6 != 0) throw std::invalid_argument("apply_pointwise: row count not a multiple of 6");
  FieldST out(x.rows(), x.cols());
  for (Eigen::Index g = 0; g < x.rows() / 6; ++g) out.middleRows<6>(6 * g).noalias() = op * x.middleRows<6>(6 * g);
  return out;
}

FieldST weight_space(const FieldST& x, const Eigen::VectorXd& w_space) {
  if (x.rows() != 6 * w_space.size()) throw std::invalid_argument("weight_space: size mismatch");
  FieldST out(x.rows(), x.cols());
  for (Eigen::Index g = 0; g < w_space.size(); ++g) out.middleRows<6>(6 * g) = w_space[g] * x.middleRows<6>(6 * g);
  return out;
}

}  // namespace latinpgd
