// Structured 8-node hexahedral meshes of a box with 2x2x2 Gauss quadrature.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <string>
#include <vector>

namespace latinpgd {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Matrix6x24 = Eigen::Matrix<double, 6, 24>;

/// Which nodes of the two end faces carry the Dirichlet conditions.
enum class SupportKind {
  face,     // every node of the end faces x = 0 and x = d1
  midline,  // the line of end-face nodes at mid-height z = d3/2
};

struct DirichletSet {
  std::string name;
  std::vector<int> nodes;
  std::array<bool, 3> directions{true, true, true};
};

struct GaussPoint {
  int element = 0;
  Eigen::Vector3d xi = Eigen::Vector3d::Zero();  // reference coordinates in [-1, 1]^3
  double weight = 0;                             // quadrature weight times det J
  Eigen::Vector3d x = Eigen::Vector3d::Zero();   // physical position
  Matrix6x24 b = Matrix6x24::Zero();             // strain-displacement rows, engineering shear
};

struct Mesh {
  Eigen::MatrixX3d nodes;
  std::vector<std::array<int, 8>> elements;
  std::vector<DirichletSet> dirichlet;
  std::vector<GaussPoint> gauss;
  std::array<double, 3> extent{0, 0, 0};
  std::array<int, 3> divisions{0, 0, 0};

  int num_nodes() const { return static_cast<int>(nodes.rows()); }
  int num_dofs() const { return 3 * num_nodes(); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_gauss() const { return static_cast<int>(gauss.size()); }
  double volume() const;

  /// Global dof indices of an element in (node, direction) order.
  std::array<int, 24> element_dofs(int e) const;
};

/// Trilinear shape functions and their reference derivatives at xi.
void hex8_shape(const Eigen::Vector3d& xi, Eigen::Matrix<double, 8, 1>& n, Eigen::Matrix<double, 8, 3>& dn);

/// Box [0,d1]x[0,d2]x[0,d3] split into nx*ny*nz hexahedra. The two end
/// faces x = 0 and x = d1 become Dirichlet sets with all directions fixed;
/// `support` selects the whole faces or their mid-height node lines.
Mesh generate_box_mesh(double d1, double d2, double d3, int nx, int ny, int nz,
                       SupportKind support = SupportKind::face);

/// Sparse global strain operator (6 n_gauss x n_dofs): rows 6g..6g+5 hold the
/// Voigt strain at Gauss point g.
SparseMatrix strain_operator(const Mesh& mesh);

/// Quadrature weights (det J times Gauss weight) per spatial Gauss point.
Eigen::VectorXd gauss_weights(const Mesh& mesh);

}  // namespace latinpgd
