#ifndef HCROM_FEM_SYSTEM_HPP
#define HCROM_FEM_SYSTEM_HPP

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hcrom/mesh.hpp"

namespace hcrom {

using Field = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;

// Source term. Only the constant source f == 1 is exercised by the studies,
// but a per-triangle table is accepted.
struct SourceTerm {
  double constant = 1.0;
  std::vector<double> per_triangle;  // overrides `constant` when nonempty

  double value_on(int triangle) const {
    return per_triangle.empty() ? constant : per_triangle[triangle];
  }
};

// Discrete operators of the affine family on interior DOFs:
//   <A_j v, w> = integral over subdomain j of grad v . grad w,
// so the parametric stiffness is sum_j y_j A_j and the H^1_0 Gram is
// S = sum_j A_j. The discrete l2 product on nodal coefficients is the
// identity and is not stored.
struct FemSystem {
  StructuredMesh mesh;
  SubdomainPartition partition;
  std::vector<int> triangle_label;  // label of each triangle
  std::vector<SparseMat> A;         // d per-subdomain stiffness matrices
  Eigen::VectorXd F;                // load vector
  SparseMat S;                      // sum of the A[j]

  int dim() const { return mesh.n_interior; }
  int d() const { return partition.d; }
};

FemSystem assemble(const StructuredMesh& mesh, const SubdomainPartition& partition,
                   const SourceTerm& f = {});

// Discrete dual norm sqrt(load^T S^{-1} load).
double h_minus1_norm(const FemSystem& sys, const Eigen::VectorXd& load);

// Dual norm of the load against the subspace of hats supported strictly
// inside subdomain j. Returns 0 when the subdomain has no interior DOFs
// at this resolution (see subdomain_interior_dofs).
double subdomain_h_minus1(const FemSystem& sys, int j);

// DOFs of vertices all of whose incident triangles carry label j.
std::vector<int> subdomain_interior_dofs(const FemSystem& sys, int j);

// Framing constants of the normalized solution family:
// C_f = h_minus1_norm(sys, F), c_f = min_j subdomain_h_minus1(sys, j).
double load_dual_norm(const FemSystem& sys);
double min_subdomain_dual_norm(const FemSystem& sys);

}  // namespace hcrom

#endif
