#ifndef HCROM_TESTS_ORACLE_HPP
#define HCROM_TESTS_ORACLE_HPP

// Dense brute-force reference implementations used to cross-check the sparse
// production paths. Each one is deliberately written along a different route:
// reference-element Jacobian assembly instead of edge-perp gradients, dense
// Cholesky instead of sparse, breadth-first component search instead of
// union-find, and eigenvalue whitening instead of Gram-Schmidt.

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "hcrom/fem_system.hpp"
#include "hcrom/param.hpp"

namespace hcrom::oracle {

struct DenseSystem {
  std::vector<Eigen::MatrixXd> A;
  Eigen::VectorXd F;
  Eigen::MatrixXd S;
  std::vector<int> triangle_label;
};

DenseSystem dense_assemble(const StructuredMesh& mesh, const SubdomainPartition& partition);

// Finite-parameter solve by dense Cholesky.
Eigen::VectorXd dense_solve(const DenseSystem& ds, const ParamVector& y);

// Constraint elimination for the stiff limit, discovered by breadth-first
// search over the vertex graph of s_set-labeled triangles. Components whose
// vertex set touches the outer boundary are pinned.
struct DenseMerged {
  Eigen::MatrixXd prolongation;  // dim x merged_dim, 0/1 entries
  int merged_dim = 0;
};

DenseMerged dense_merge(const StructuredMesh& mesh, const std::vector<int>& triangle_label,
                        const std::vector<int>& s_set);

// Limit solve u_S at a parameter with infinite entries (its infinite set is S).
Eigen::VectorXd dense_limit_solve(const StructuredMesh& mesh, const DenseSystem& ds,
                                  const ParamVector& y);

// Neumann-series coefficients v_nu computed densely: A_bar = sum_i ybar[i]*A[i]
// factored once, v_0 = A_bar^{-1} F, v_nu = -A_bar^{-1} sum_{p: nu_p>0} A[varying[p]]
// v_{nu - e_p}. Keyed by multi-index over the varying positions so the caller
// does not depend on any particular enumeration order.
std::map<std::vector<int>, Eigen::VectorXd> dense_neumann(const std::vector<Eigen::MatrixXd>& A,
                                                          const Eigen::VectorXd& F,
                                                          const std::vector<double>& ybar,
                                                          const std::vector<int>& varying,
                                                          int degree);

// Stability constant 1/sigma_min between V and W after whitening both with the
// inverse square root of their gram-S Gram (eigenvalue route).
double dense_mu(const Eigen::MatrixXd& gram_s, const Eigen::MatrixXd& v_basis,
                const Eigen::MatrixXd& w_basis);

}  // namespace hcrom::oracle

#endif
