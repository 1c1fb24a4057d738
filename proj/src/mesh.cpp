#include "latinpgd/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace latinpgd {

namespace {

constexpr std::array<std::array<int, 3>, 8> kCorner{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

}  // namespace

void hex8_shape(const Eigen::Vector3d& xi, Eigen::Matrix<double, 8, 1>& n, Eigen::Matrix<double, 8, 3>& dn) {
  for (int a = 0; a < 8; ++a) {
    const double sx = kCorner[a][0] ? 1.0 : -1.0;
    const double sy = kCorner[a][1] ? 1.0 : -1.0;
    const double sz = kCorner[a][2] ? 1.0 : -1.0;
    const double fx = 1 + sx * xi[0];
    const double fy = 1 + sy * xi[1];
    const double fz = 1 + sz * xi[2];
    n[a] = 0.125 * fx * fy * fz;
    dn(a, 0) = 0.125 * sx * fy * fz;
    dn(a, 1) = 0.125 * fx * sy * fz;
    dn(a, 2) = 0.125 * fx * fy * sz;
  }
}

double Mesh::volume() const {
  double v = 0;
  for (const auto& g : gauss) v += g.weight;
  return v;
}

std::array<int, 24> Mesh::element_dofs(int e) const {
  std::array<int, 24> dofs{};
  for (int a = 0; a < 8; ++a)
    for (int c = 0; c < 3; ++c) dofs[3 * a + c] = 3 * elements[e][a] + c;
  return dofs;
}

Mesh generate_box_mesh(double d1, double d2, double d3, int nx, int ny, int nz, SupportKind support) {
  if (!(d1 > 0 && d2 > 0 && d3 > 0)) throw std::invalid_argument("generate_box_mesh: dimensions must be positive");
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("generate_box_mesh: element counts must be >= 1");
  if (support == SupportKind::midline && nz % 2 != 0)
    throw std::invalid_argument("generate_box_mesh: midline support needs an even nz");

  Mesh mesh;
  mesh.extent = {d1, d2, d3};
  mesh.divisions = {nx, ny, nz};
  // x varies slowest so that the long axis gives a narrow band.
  auto node_id = [&](int i, int j, int k) { return k + (nz + 1) * (j + (ny + 1) * i); };
  mesh.nodes.resize((nx + 1) * (ny + 1) * (nz + 1), 3);
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nz; ++k)
        mesh.nodes.row(node_id(i, j, k)) << d1 * i / nx, d2 * j / ny, d3 * k / nz;

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        std::array<int, 8> conn{};
        for (int a = 0; a < 8; ++a) conn[a] = node_id(i + kCorner[a][0], j + kCorner[a][1], k + kCorner[a][2]);
        mesh.elements.push_back(conn);
      }

  for (int side = 0; side < 2; ++side) {
    DirichletSet set;
    set.name = side == 0 ? "x0" : "x1";
    const int i = side == 0 ? 0 : nx;
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nz; ++k)
        if (support == SupportKind::face || 2 * k == nz) set.nodes.push_back(node_id(i, j, k));
    mesh.dirichlet.push_back(set);
  }

  const double gp = 1.0 / std::sqrt(3.0);
  Eigen::Matrix<double, 8, 1> n;
  Eigen::Matrix<double, 8, 3> dn;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Matrix<double, 8, 3> xe;
    for (int a = 0; a < 8; ++a) xe.row(a) = mesh.nodes.row(mesh.elements[e][a]);
    for (int q = 0; q < 8; ++q) {
      GaussPoint g;
      g.element = e;
      g.xi << (kCorner[q][0] ? gp : -gp), (kCorner[q][1] ? gp : -gp), (kCorner[q][2] ? gp : -gp);
      hex8_shape(g.xi, n, dn);
      const Eigen::Matrix3d jac = xe.transpose() * dn;  // dx_i / dxi_j
      const double det = jac.determinant();
      if (!(det > 0)) throw std::runtime_error("generate_box_mesh: non-positive Jacobian");
      const Eigen::Matrix<double, 8, 3> grad = dn * jac.inverse();
      g.weight = det;
      g.x = xe.transpose() * n;
      for (int a = 0; a < 8; ++a) {
        const int c = 3 * a;
        g.b(0, c + 0) = grad(a, 0);
        g.b(1, c + 1) = grad(a, 1);
        g.b(2, c + 2) = grad(a, 2);
        g.b(3, c + 1) = grad(a, 2);
        g.b(3, c + 2) = grad(a, 1);
        g.b(4, c + 0) = grad(a, 2);
        g.b(4, c + 2) = grad(a, 0);
        g.b(5, c + 0) = grad(a, 1);
        g.b(5, c + 1) = grad(a, 0);
      }
      mesh.gauss.push_back(g);
    }
  }
  return mesh;
}

SparseMatrix strain_operator(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.num_gauss()) * 6 * 24);
  for (int g = 0; g < mesh.num_gauss(); ++g) {
    const auto dofs = mesh.element_dofs(mesh.gauss[g].element);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 24; ++c)
        if (mesh.gauss[g].b(r, c) != 0) trip.emplace_back(6 * g + r, dofs[c], mesh.gauss[g].b(r, c));
  }
  SparseMatrix b(6 * mesh.num_gauss(), mesh.num_dofs());
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

Eigen::VectorXd gauss_weights(const Mesh& mesh) {
  Eigen::VectorXd w(mesh.num_gauss());
  for (int g = 0; g < mesh.num_gauss(); ++g) w[g] = mesh.gauss[g].weight;
  return w;
}

}  // namespace latinpgd
