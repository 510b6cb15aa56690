#include "hcrom/solver.hpp"

#include <numeric>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "hcrom/errors.hpp"

namespace hcrom {

Eigen::VectorXd spd_solve(const SparseMat& m, const Eigen::VectorXd& b, double tol,
                          SolveBackend backend) {
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("spd_solve: tol must be in (0,1)");
  if (b.isZero(0.0)) return Eigen::VectorXd::Zero(b.size());

  if (backend == SolveBackend::direct) {
    Eigen::SimplicialLLT<SparseMat> llt(m);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("spd_solve: sparse Cholesky factorization failed");
    }
    Eigen::VectorXd x = llt.solve(b);
    double rel = (m * x - b).norm() / b.norm();
    if (!(rel <= tol)) {
      // One step of iterative refinement rescues ill-conditioned parameter
      // combinations (contrast ~ 1e8) without loosening the residual guard.
      x += llt.solve(b - m * x);
      rel = (m * x - b).norm() / b.norm();
    }
    if (!(rel <= tol) && rel > 1e-8) {
      throw NumericalError("spd_solve: direct solve residual " + std::to_string(rel));
    }
    return x;
  }

  Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(20 * m.rows() + 100);
  cg.compute(m);
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    throw NumericalError("spd_solve: cg failed to converge, final residual " +
                         std::to_string(cg.error()));
  }
  return x;
}

MergedSystem build_merged(const FemSystem& sys, const std::vector<int>& s_set) {
  if (s_set.empty()) throw ConfigError("build_merged: empty subdomain subset");
  std::vector<char> in_s(sys.d(), 0);
  for (int j : s_set) {
    if (j < 0 || j >= sys.d()) throw ConfigError("build_merged: subdomain index out of range");
    in_s[j] = 1;
  }

  const auto& mesh = sys.mesh;
  const int nv = static_cast<int>(mesh.vertices.size());

  // Union-find over vertices of triangles labeled in s_set.
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  std::vector<char> in_component(nv, 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!in_s[sys.triangle_label[t]]) continue;
    const auto& tri = mesh.triangles[t];
    unite(tri[0], tri[1]);
    unite(tri[1], tri[2]);
    for (int v : tri) in_component[v] = 1;
  }

  // Components containing any outer-boundary vertex are pinned to 0.
  std::vector<char> pinned_root(nv, 0);
  for (int v = 0; v < nv; ++v) {
    if (in_component[v] && mesh.on_boundary(v)) pinned_root[find(v)] = 1;
  }

  MergedSystem merged;
  merged.s_set = s_set;
  merged.merge_map.assign(sys.dim(), -1);
  std::vector<int> ordinal_of_root(nv, -1);
  int next = 0;
  for (int v = 0; v < nv; ++v) {
    const int dof = mesh.interior_dof[v];
    if (dof < 0) continue;
    if (!in_component[v]) {
      merged.merge_map[dof] = next++;
      continue;
    }
    const int root = find(v);
    if (pinned_root[root]) continue;  // stays -1
    if (ordinal_of_root[root] < 0) ordinal_of_root[root] = next++;
    merged.merge_map[dof] = ordinal_of_root[root];
  }
  merged.merged_dim = next;

  std::vector<Eigen::Triplet<double>> trip;
  for (int dof = 0; dof < sys.dim(); ++dof) {
    if (merged.merge_map[dof] >= 0) trip.emplace_back(dof, merged.merge_map[dof], 1.0);
  }
  merged.restriction.resize(sys.dim(), merged.merged_dim);
  merged.restriction.setFromTriplets(trip.begin(), trip.end());
  merged.restriction.makeCompressed();
  return merged;
}

Field solve_full(const FemSystem& sys, const ParamVector& y, SolveBackend backend) {
  if (y.dim() != sys.d()) throw ConfigError("solve_full: parameter dimension mismatch");
  if (y.all_infinite()) return Field::Zero(sys.dim());

  const std::vector<int> s = y.infinite_set();
  if (s.empty()) {
    SparseMat a = y[0] * sys.A[0];
    for (int j = 1; j < sys.d(); ++j) a += y[j] * sys.A[j];
    return spd_solve(a, sys.F, 1e-12, backend);
  }

  const MergedSystem merged = build_merged(sys, s);
  if (merged.merged_dim == 0) return Field::Zero(sys.dim());

  std::vector<char> in_s(sys.d(), 0);
  for (int j : s) in_s[j] = 1;
  SparseMat a_free;
  bool first = true;
  for (int j = 0; j < sys.d(); ++j) {
    if (in_s[j]) continue;
    if (first) {
      a_free = y[j] * sys.A[j];
      first = false;
    } else {
      a_free += y[j] * sys.A[j];
    }
  }
  const SparseMat r = merged.restriction;
  SparseMat reduced = r.transpose() * a_free * r;
  reduced.makeCompressed();
  const Eigen::VectorXd rhs = r.transpose() * sys.F;
  return r * spd_solve(reduced, rhs, 1e-12, backend);
}

namespace {

// Per-subdomain Dirichlet energies evaluated element-wise from nodal
// differences. On a merged limit solution the differences vanish exactly, so
// stiff subdomains carry an exact zero; every triangle contributes a
// nonnegative sum of squares, which keeps the framing inequalities
// y_j >= 1  =>  sum_j E_j <= sum_j y_j E_j monotone in floating point.
std::vector<double> subdomain_energies(const FemSystem& sys, const Field& v) {
  if (v.size() != sys.dim()) throw ConfigError("subdomain energy: field has wrong length");
  const auto& mesh = sys.mesh;
  std::vector<double> e(sys.d(), 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int i0 = mesh.interior_dof[tri[0]];
    const int i1 = mesh.interior_dof[tri[1]];
    const int i2 = mesh.interior_dof[tri[2]];
    const double v0 = i0 < 0 ? 0.0 : v[i0];
    const double d1 = (i1 < 0 ? 0.0 : v[i1]) - v0;
    const double d2 = (i2 < 0 ? 0.0 : v[i2]) - v0;
    if (d1 == 0.0 && d2 == 0.0) continue;
    const Eigen::Vector2d e1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Eigen::Vector2d e2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    const double det = e1.x() * e2.y() - e1.y() * e2.x();  // 2 * area, positive
    const double gx = e2.y() * d1 - e1.y() * d2;
    const double gy = -e2.x() * d1 + e1.x() * d2;
    e[sys.triangle_label[t]] += (gx * gx + gy * gy) / (2.0 * det);
  }
  return e;
}

}  // namespace

double subdomain_energy(const FemSystem& sys, const Field& v, int j) {
  if (j < 0 || j >= sys.d()) throw ConfigError("subdomain_energy: subdomain index out of range");
  return subdomain_energies(sys, v)[j];
}

double norm_y(const FemSystem& sys, const Field& v, const ParamVector& y) {
  if (y.dim() != sys.d()) throw ConfigError("norm_y: parameter dimension mismatch");
  const std::vector<double> e = subdomain_energies(sys, v);
  double sq = 0.0;
  for (int j = 0; j < sys.d(); ++j) {
    if (y.is_infinite(j)) {
      if (e[j] > 0.0) {
        throw NumericalError("norm_y: infinite energy, field has gradient on subdomain " +
                             std::to_string(j) + " with infinite diffusivity");
      }
      continue;
    }
    sq += y[j] * e[j];
  }
  return std::sqrt(sq);
}

double norm_h10(const FemSystem& sys, const Field& v) {
  const std::vector<double> e = subdomain_energies(sys, v);
  double sq = 0.0;
  for (int j = 0; j < sys.d(); ++j) sq += e[j];
  return std::sqrt(sq);
}

}  // namespace hcrom
