// Discontinuous cubic temporal elements and the incremental TDG march for
// scalar second-order ODEs a x'' + c x' + b x = f.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>

namespace latinpgd {

enum class TdgScheme {
  jump,           // time-discontinuous Galerkin with value and velocity jump terms
  value_penalty,  // Galerkin rows plus a value-continuity penalty of 1.1 max|Q|
};

TdgScheme parse_tdg_scheme(const std::string& name);
std::string to_string(TdgScheme scheme);

/// Uniform grid of n degree-3 Lagrange elements on [0, T] with 4-point
/// Gauss-Legendre quadrature per element. Reference coordinate s in [0, 1].
class TimeGrid {
 public:
  static constexpr int kNodes = 4;

  TimeGrid(double horizon, int n_elements);

  double horizon() const { return horizon_; }
  int num_elements() const { return n_; }
  double step() const { return h_; }
  int num_dofs() const { return kNodes * n_; }
  int num_gauss() const { return kNodes * n_; }

  /// Shape values (der = 0) or derivatives in physical time (der = 1, 2) at s.
  Eigen::Vector4d shape(double s, int der = 0) const;
  /// Tabulated shapes at the Gauss points: row q, column node i.
  const Eigen::Matrix4d& gauss_shape(int der = 0) const { return tab_[der]; }
  const Eigen::Vector4d& gauss_points() const { return xg_; }   // reference coords
  const Eigen::Vector4d& gauss_ref_weights() const { return wg_; }  // sum to 1

  Eigen::VectorXd gauss_times() const;
  Eigen::VectorXd gauss_weights() const;
  Eigen::VectorXd node_times() const;
  /// Element containing t (right-continuous; t = T maps to the last element).
  int element_of(double t) const;

  bool operator==(const TimeGrid& o) const { return n_ == o.n_ && horizon_ == o.horizon_; }
  bool operator!=(const TimeGrid& o) const { return !(*this == o); }

 private:
  double horizon_;
  int n_;
  double h_;
  Eigen::Vector4d xg_, wg_;
  std::array<Eigen::Matrix4d, 3> tab_;
};

/// Piecewise cubic, possibly discontinuous function; coefficients are nodal
/// values stored element by element (4 per element).
class TimeFunction {
 public:
  explicit TimeFunction(const TimeGrid& grid);
  TimeFunction(const TimeGrid& grid, Eigen::VectorXd coefficients);
  static TimeFunction constant(const TimeGrid& grid, double value);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::VectorXd& coefficients() const { return c_; }
  Eigen::VectorXd& coefficients() { return c_; }

  double value(double t, int der = 0) const;
  /// Values (or derivatives) at every temporal Gauss point.
  Eigen::VectorXd at_gauss(int der = 0) const;

  /// lambda(t_k+) - lambda(t_k-) at interior element boundary k (1..n-1).
  double jump(int k) const;
  double max_jump() const;
  double max_abs() const { return c_.cwiseAbs().maxCoeff(); }

  TimeFunction& operator*=(double s) { c_ *= s; return *this; }
  TimeFunction operator*(double s) const { return {grid_, c_ * s}; }
  TimeFunction operator+(const TimeFunction& o) const;
  TimeFunction operator-(const TimeFunction& o) const;

 private:
  TimeGrid grid_;
  Eigen::VectorXd c_;
};

/// Gauss values of all columns of a (4 n x m) coefficient matrix.
Eigen::MatrixXd gauss_values(const TimeGrid& grid, const Eigen::MatrixXd& coefficients, int der = 0);

/// Integral of f g over [0, T] by the grid quadrature.
double st_inner(const TimeFunction& f, const TimeFunction& g);

/// Element-wise least-squares cubic fit of per-Gauss samples.
TimeFunction l2_fit(const TimeGrid& grid, const Eigen::VectorXd& samples);

struct MarchReport {
  int factorizations = 0;
  double max_jump = 0;
};

/// March a x'' + c x' + b x = f element by element, x(0) = x_init, x'(0) = 0.
/// One 4x4 factorization is computed and reused for every element.
TimeFunction tdgm_march(const TimeGrid& grid, double a, double c, double b, const Eigen::VectorXd& f_gauss,
                        double x_init = 0, TdgScheme scheme = TdgScheme::jump, MarchReport* report = nullptr);
TimeFunction tdgm_march(double a, double c, double b, const TimeFunction& f, double x_init = 0,
                        TdgScheme scheme = TdgScheme::jump, MarchReport* report = nullptr);

}  // namespace latinpgd
