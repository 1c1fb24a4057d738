// Assembly, Dirichlet partition, modal analysis and Rayleigh damping.
#pragma once

#include "latinpgd/mesh.hpp"
#include "latinpgd/tensor.hpp"

#include <vector>

namespace latinpgd {

SparseMatrix assemble_mass(const Mesh& mesh, double rho);
SparseMatrix assemble_stiffness(const Mesh& mesh, const Hooke& hooke);

std::vector<SymTensor> strain_at_gauss(const Mesh& mesh, const Eigen::VectorXd& u);
/// Same as strain_at_gauss, packed as a 6 x n_gauss matrix.
Matrix6X strain_field(const Mesh& mesh, const Eigen::VectorXd& u);

std::vector<SymTensor> stress_at_gauss(const Hooke& hooke, const std::vector<SymTensor>& strain);

Eigen::VectorXd internal_force(const Mesh& mesh, const std::vector<SymTensor>& stress);
Eigen::VectorXd internal_force(const Mesh& mesh, const Matrix6X& stress);

struct RayleighDamping {
  double alpha = 0;  // 1/s, multiplies M
  double beta = 0;   // s, multiplies K
  bool enabled() const { return alpha != 0 || beta != 0; }
  /// Modal damping ratio at frequency f (Hz).
  double ratio(double f) const;
};

/// Rayleigh coefficients giving damping ratio xi exactly at f_a and f_b.
RayleighDamping rayleigh_coeffs(double xi, double f_a, double f_b);

struct ModalResult {
  Eigen::VectorXd frequencies;  // Hz, ascending
  Eigen::MatrixXd shapes;       // columns, M-orthonormal
};

/// Lowest n modes of K phi = w^2 M phi (dense generalized eigensolver).
ModalResult modal_analysis(const SparseMatrix& m, const SparseMatrix& k, int n);

/// Mass, stiffness and damping of a mesh with the free/prescribed partition.
class SpatialSystem {
 public:
  SpatialSystem(Mesh mesh, double rho, const Hooke& hooke, RayleighDamping damping = {});

  const Mesh& mesh() const { return mesh_; }
  const Hooke& hooke() const { return hooke_; }
  double rho() const { return rho_; }
  const RayleighDamping& rayleigh() const { return damping_; }
  bool damped() const { return damping_.enabled(); }

  const SparseMatrix& mass() const { return m_; }
  const SparseMatrix& stiffness() const { return k_; }
  const SparseMatrix& damping() const { return c_; }

  const std::vector<int>& free_dofs() const { return free_; }
  const std::vector<int>& prescribed_dofs() const { return prescribed_; }
  int num_free() const { return static_cast<int>(free_.size()); }
  int num_gauss() const { return mesh_.num_gauss(); }

  // Free-free and free-prescribed blocks.
  const SparseMatrix& mass_ff() const { return m_ff_; }
  const SparseMatrix& stiffness_ff() const { return k_ff_; }
  const SparseMatrix& damping_ff() const { return c_ff_; }
  const SparseMatrix& mass_fp() const { return m_fp_; }
  const SparseMatrix& stiffness_fp() const { return k_fp_; }
  const SparseMatrix& damping_fp() const { return c_fp_; }

  /// Strain operator on all dofs (6 n_gauss x n_dofs) and on free dofs only.
  const SparseMatrix& strain_op() const { return b_; }
  const SparseMatrix& strain_op_free() const { return b_f_; }
  const Eigen::VectorXd& weights() const { return w_; }

  Eigen::VectorXd expand_free(const Eigen::VectorXd& free_values) const;
  Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const;

 private:
  Mesh mesh_;
  double rho_;
  Hooke hooke_;
  RayleighDamping damping_;
  SparseMatrix m_, k_, c_;
  SparseMatrix m_ff_, k_ff_, c_ff_, m_fp_, k_fp_, c_fp_;
  SparseMatrix b_, b_f_;
  Eigen::VectorXd w_;
  std::vector<int> free_, prescribed_;
};

}  // namespace latinpgd
