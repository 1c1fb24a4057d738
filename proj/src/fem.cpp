#include "latinpgd/fem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace latinpgd {

namespace {

SparseMatrix assemble(const Mesh& mesh, const std::vector<Eigen::Matrix<double, 24, 24>>& blocks) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(blocks.size() * 24 * 24);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto dofs = mesh.element_dofs(e);
    for (int i = 0; i < 24; ++i)
      for (int j = 0; j < 24; ++j)
        if (blocks[e](i, j) != 0) trip.emplace_back(dofs[i], dofs[j], blocks[e](i, j));
  }
  SparseMatrix a(mesh.num_dofs(), mesh.num_dofs());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SparseMatrix selection(const std::vector<int>& rows, int n) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) trip.emplace_back(i, rows[i], 1.0);
  SparseMatrix p(static_cast<Eigen::Index>(rows.size()), n);
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

}  // namespace

SparseMatrix assemble_mass(const Mesh& mesh, double rho) {
  std::vector<Eigen::Matrix<double, 24, 24>> blocks(mesh.num_elements(), Eigen::Matrix<double, 24, 24>::Zero());
  Eigen::Matrix<double, 8, 1> n;
  Eigen::Matrix<double, 8, 3> dn;
  for (const auto& g : mesh.gauss) {
    hex8_shape(g.xi, n, dn);
    const Eigen::Matrix<double, 8, 8> nn = rho * g.weight * n * n.transpose();
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        for (int c = 0; c < 3; ++c) blocks[g.element](3 * a + c, 3 * b + c) += nn(a, b);
  }
  return assemble(mesh, blocks);
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const Hooke& hooke) {
  std::vector<Eigen::Matrix<double, 24, 24>> blocks(mesh.num_elements(), Eigen::Matrix<double, 24, 24>::Zero());
  for (const auto& g : mesh.gauss) blocks[g.element] += g.weight * g.b.transpose() * hooke.stiffness() * g.b;
  // Symmetrize against round-off in the triple product.
  for (auto& blk : blocks) blk = 0.5 * (blk + blk.transpose()).eval();
  return assemble(mesh, blocks);
}

Matrix6X strain_field(const Mesh& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.num_dofs()) throw std::invalid_argument("strain_field: displacement size mismatch");
  Matrix6X eps(6, mesh.num_gauss());
  for (int g = 0; g < mesh.num_gauss(); ++g) {
    const auto dofs = mesh.element_dofs(mesh.gauss[g].element);
    Eigen::Matrix<double, 24, 1> ue;
    for (int i = 0; i < 24; ++i) ue[i] = u[dofs[i]];
    eps.col(g) = mesh.gauss[g].b * ue;
  }
  return eps;
}

std::vector<SymTensor> strain_at_gauss(const Mesh& mesh, const Eigen::VectorXd& u) {
  const Matrix6X eps = strain_field(mesh, u);
  std::vector<SymTensor> out;
  out.reserve(eps.cols());
  for (int g = 0; g < eps.cols(); ++g) out.push_back(SymTensor::strain(eps.col(g)));
  return out;
}

std::vector<SymTensor> stress_at_gauss(const Hooke& hooke, const std::vector<SymTensor>& strain) {
  std::vector<SymTensor> out;
  out.reserve(strain.size());
  for (const auto& e : strain) out.push_back(hooke.apply(e));
  return out;
}

Eigen::VectorXd internal_force(const Mesh& mesh, const Matrix6X& stress) {
  if (stress.cols() != mesh.num_gauss()) throw std::invalid_argument("internal_force: one stress per Gauss point expected");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_dofs());
  for (int g = 0; g < mesh.num_gauss(); ++g) {
    const auto dofs = mesh.element_dofs(mesh.gauss[g].element);
    const Eigen::Matrix<double, 24, 1> fe = mesh.gauss[g].weight * mesh.gauss[g].b.transpose() * stress.col(g);
    for (int i = 0; i < 24; ++i) f[dofs[i]] += fe[i];
  }
  return f;
}

Eigen::VectorXd internal_force(const Mesh& mesh, const std::vector<SymTensor>& stress) {
  if (static_cast<int>(stress.size()) != mesh.num_gauss())
    throw std::invalid_argument("internal_force: one stress per Gauss point expected");
  Matrix6X s(6, mesh.num_gauss());
  for (int g = 0; g < mesh.num_gauss(); ++g) {
    if (stress[g].flavor() != Flavor::stress) throw std::invalid_argument("internal_force: stress flavor expected");
    s.col(g) = stress[g].voigt();
  }
  return internal_force(mesh, s);
}

double RayleighDamping::ratio(double f) const {
  const double w = 2 * std::numbers::pi * f;
  return 0.5 * (alpha / w + beta * w);
}

RayleighDamping rayleigh_coeffs(double xi, double f_a, double f_b) {
  if (!(xi >= 0 && xi < 1)) throw std::invalid_argument("rayleigh_coeffs: damping ratio must lie in [0, 1)");
  if (!(f_a > 0 && f_b > f_a)) throw std::invalid_argument("rayleigh_coeffs: need 0 < f_a < f_b");
  const double wa = 2 * std::numbers::pi * f_a;
  const double wb = 2 * std::numbers::pi * f_b;
  return {2 * xi * wa * wb / (wa + wb), 2 * xi / (wa + wb)};
}

ModalResult modal_analysis(const SparseMatrix& m, const SparseMatrix& k, int n) {
  if (m.rows() != k.rows() || m.rows() != m.cols() || k.rows() != k.cols())
    throw std::invalid_argument("modal_analysis: matrix size mismatch");
  if (n < 1 || n > m.rows()) throw std::invalid_argument("modal_analysis: requested more modes than free dofs");
  const Eigen::MatrixXd kd(k);
  const Eigen::MatrixXd md(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(kd, md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw std::runtime_error("modal_analysis: eigensolver failed");
  ModalResult out;
  out.frequencies.resize(n);
  out.shapes = solver.eigenvectors().leftCols(n);
  for (int i = 0; i < n; ++i) {
    out.frequencies[i] = std::sqrt(std::max(solver.eigenvalues()[i], 0.0)) / (2 * std::numbers::pi);
    Eigen::VectorXd phi = out.shapes.col(i);
    phi /= std::sqrt(phi.dot(md * phi));
    for (int j = 0; j < phi.size(); ++j) {
      if (std::abs(phi[j]) > 1e-12) {
        if (phi[j] < 0) phi = -phi;
        break;
      }
    }
    out.shapes.col(i) = phi;
  }
  return out;
}

SpatialSystem::SpatialSystem(Mesh mesh, double rho, const Hooke& hooke, RayleighDamping damping)
    : mesh_(std::move(mesh)), rho_(rho), hooke_(hooke), damping_(damping) {
  if (!(rho > 0)) throw std::invalid_argument("SpatialSystem: density must be positive");
  m_ = assemble_mass(mesh_, rho_);
  k_ = assemble_stiffness(mesh_, hooke_);
  c_ = damping_.alpha * m_ + damping_.beta * k_;

  std::vector<char> fixed(mesh_.num_dofs(), 0);
  for (const auto& set : mesh_.dirichlet)
    for (int node : set.nodes) {
      if (node < 0 || node >= mesh_.num_nodes()) throw std::invalid_argument("SpatialSystem: Dirichlet node out of range");
      for (int c = 0; c < 3; ++c)
        if (set.directions[c]) fixed[3 * node + c] = 1;
    }
  for (int i = 0; i < mesh_.num_dofs(); ++i) (fixed[i] ? prescribed_ : free_).push_back(i);

  const SparseMatrix pf = selection(free_, mesh_.num_dofs());
  const SparseMatrix pp = selection(prescribed_, mesh_.num_dofs());
  const SparseMatrix pft = pf.transpose();
  const SparseMatrix ppt = pp.transpose();
  m_ff_ = pf * m_ * pft;
  k_ff_ = pf * k_ * pft;
  c_ff_ = pf * c_ * pft;
  m_fp_ = pf * m_ * ppt;
  k_fp_ = pf * k_ * ppt;
  c_fp_ = pf * c_ * ppt;
  b_ = strain_operator(mesh_);
  b_f_ = b_ * pft;
  w_ = gauss_weights(mesh_);
}

Eigen::VectorXd SpatialSystem::expand_free(const Eigen::VectorXd& free_values) const {
  if (free_values.size() != num_free()) throw std::invalid_argument("expand_free: size mismatch");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh_.num_dofs());
  for (int i = 0; i < num_free(); ++i) full[free_[i]] = free_values[i];
  return full;
}

Eigen::VectorXd SpatialSystem::restrict_free(const Eigen::VectorXd& full) const {
  if (full.size() != mesh_.num_dofs()) throw std::invalid_argument("restrict_free: size mismatch");
  Eigen::VectorXd out(num_free());
  for (int i = 0; i < num_free(); ++i) out[i] = full[free_[i]];
  return out;
}

}  // namespace latinpgd
