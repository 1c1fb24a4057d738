#include "latinpgd/local_stage.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace latinpgd {

LocalFields local_stage(const FieldST& eps, const Eigen::VectorXd& times, const MaterialParams& p,
                        const std::vector<int>* order) {
  if (eps.rows() % 6 != 0) throw std::invalid_argument("local_stage: strain rows not a multiple of 6");
  if (eps.cols() != times.size()) throw std::invalid_argument("local_stage: one strain column per time sample expected");
  const int n_s = static_cast<int>(eps.rows() / 6);
  const int n_t = static_cast<int>(eps.cols());
  if (order && static_cast<int>(order->size()) != n_s) throw std::invalid_argument("local_stage: order size mismatch");
  const Hooke hooke = p.hooke();

  LocalFields out;
  out.sigma.resize(eps.rows(), n_t);
  out.d.resize(n_s, n_t);
  out.dbar.resize(n_s, n_t);
  out.y.resize(n_s, n_t);
  out.z.resize(n_s, n_t);
  out.zz.resize(n_s, n_t);

  std::atomic<int> bad_point{-1};
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_s; ++i) {
    const int g = order ? (*order)[i] : i;
    if (!eps.middleRows<6>(6 * g).allFinite()) {
      bad_point = g;
      continue;
    }
    PointHistory h;
    for (int k = 0; k < n_t; ++k) {
      const PointSample s = advance_point(h, eps.block<6, 1>(6 * g, k), times[k], p, hooke);
      out.sigma.block<6, 1>(6 * g, k) = s.sigma;
      out.d(g, k) = s.d;
      out.dbar(g, k) = s.dbar;
      out.y(g, k) = s.y;
      out.z(g, k) = s.z;
      out.zz(g, k) = s.zz;
    }
  }
  if (bad_point >= 0)
    throw std::runtime_error("local_stage: non-finite strain at spatial Gauss point " + std::to_string(bad_point.load()));
  return out;
}

}  // namespace latinpgd
