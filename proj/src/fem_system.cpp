#include "hcrom/fem_system.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "hcrom/errors.hpp"

namespace hcrom {

namespace {

// Exact P1 element stiffness: K_ab = area * grad(phi_a) . grad(phi_b),
// with grad(phi_a) = perp(p_c - p_b) / (2 area) for (a,b,c) cyclic.
void element_stiffness(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                       const Eigen::Vector2d& p2, Eigen::Matrix3d& k, double& area) {
  const Eigen::Vector2d e1 = p1 - p0, e2 = p2 - p0;
  area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  Eigen::Matrix<double, 2, 3> grad;
  const Eigen::Vector2d edges[3] = {p2 - p1, p0 - p2, p1 - p0};
  for (int a = 0; a < 3; ++a) {
    grad.col(a) = Eigen::Vector2d(-edges[a].y(), edges[a].x()) / (2.0 * area);
  }
  k = area * grad.transpose() * grad;
}

}  // namespace

FemSystem assemble(const StructuredMesh& mesh, const SubdomainPartition& partition,
                   const SourceTerm& f) {
  FemSystem sys;
  sys.mesh = mesh;
  sys.partition = partition;
  sys.triangle_label = label_triangles(mesh, partition);
  if (!f.per_triangle.empty() && f.per_triangle.size() != mesh.triangles.size()) {
    throw ConfigError("assemble: per-triangle source table size mismatch");
  }

  const int n = mesh.n_interior;
  const int d = partition.d;
  std::vector<std::vector<Eigen::Triplet<double>>> trip(d);
  sys.F = Eigen::VectorXd::Zero(n);

  Eigen::Matrix3d k;
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    element_stiffness(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]],
                      k, area);
    const int label = sys.triangle_label[t];
    const double f_t = f.value_on(static_cast<int>(t));
    for (int a = 0; a < 3; ++a) {
      const int ia = mesh.interior_dof[tri[a]];
      if (ia < 0) continue;
      // Each P1 hat integrates to area/3 over the triangle.
      sys.F[ia] += f_t * area / 3.0;
      for (int b = 0; b < 3; ++b) {
        const int ib = mesh.interior_dof[tri[b]];
        if (ib < 0) continue;
        trip[label].emplace_back(ia, ib, k(a, b));
      }
    }
  }

  sys.A.resize(d);
  for (int j = 0; j < d; ++j) {
    sys.A[j].resize(n, n);
    sys.A[j].setFromTriplets(trip[j].begin(), trip[j].end());
    sys.A[j].makeCompressed();
  }
  sys.S = sys.A[0];
  for (int j = 1; j < d; ++j) sys.S += sys.A[j];
  sys.S.makeCompressed();
  return sys;
}

double h_minus1_norm(const FemSystem& sys, const Eigen::VectorXd& load) {
  if (load.size() != sys.dim()) {
    throw ConfigError("h_minus1_norm: load has wrong length");
  }
  if (load.isZero(0.0)) return 0.0;
  Eigen::SimplicialLLT<SparseMat> llt(sys.S);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("h_minus1_norm: Cholesky factorization of S failed");
  }
  return std::sqrt(load.dot(llt.solve(load)));
}

std::vector<int> subdomain_interior_dofs(const FemSystem& sys, int j) {
  const auto& mesh = sys.mesh;
  // all_j[v] stays true only if every triangle incident to v has label j.
  std::vector<char> all_j(mesh.vertices.size(), 1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (sys.triangle_label[t] == j) continue;
    for (int v : mesh.triangles[t]) all_j[v] = 0;
  }
  std::vector<char> touched(mesh.vertices.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (sys.triangle_label[t] != j) continue;
    for (int v : mesh.triangles[t]) touched[v] = 1;
  }
  std::vector<int> dofs;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const int dof = mesh.interior_dof[v];
    if (dof >= 0 && touched[v] && all_j[v]) dofs.push_back(dof);
  }
  return dofs;
}

double subdomain_h_minus1(const FemSystem& sys, int j) {
  if (j < 0 || j >= sys.d()) {
    throw ConfigError("subdomain_h_minus1: subdomain index out of range");
  }
  const std::vector<int> dofs = subdomain_interior_dofs(sys, j);
  if (dofs.empty()) return 0.0;

  const int m = static_cast<int>(dofs.size());
  Eigen::VectorXd load(m);
  for (int i = 0; i < m; ++i) load[i] = sys.F[dofs[i]];

  // Restricted Gram: for hats supported inside subdomain j the H^1_0
  // product reduces to the A_j block.
  Eigen::MatrixXd gram(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) gram(a, b) = sys.S.coeff(dofs[a], dofs[b]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("subdomain_h_minus1: restricted Gram not SPD");
  }
  return std::sqrt(load.dot(llt.solve(load)));
}

double load_dual_norm(const FemSystem& sys) { return h_minus1_norm(sys, sys.F); }

double min_subdomain_dual_norm(const FemSystem& sys) {
  double cf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sys.d(); ++j) cf = std::min(cf, subdomain_h_minus1(sys, j));
  return cf;
}

}  // namespace hcrom
