#ifndef HCROM_SOLVER_HPP
#define HCROM_SOLVER_HPP

#include <vector>

#include "hcrom/fem_system.hpp"
#include "hcrom/param.hpp"

namespace hcrom {

enum class SolveBackend { direct, cg };

// Solve M x = b for sparse SPD M. The direct backend (default) factorizes
// with a sparse Cholesky and is bit-reproducible across runs; the cg
// backend is a diagonally preconditioned conjugate gradient with the given
// relative-residual tolerance.
Eigen::VectorXd spd_solve(const SparseMat& m, const Eigen::VectorXd& b,
                          double tol = 1e-12,
                          SolveBackend backend = SolveBackend::direct);

// Constraint elimination for the stiff limit: DOFs connected through
// triangles of subdomains in s_set collapse to a single value per
// connected component, and components whose closure touches the outer
// boundary are pinned to 0. Full coefficients = restriction * merged
// coefficients.
struct MergedSystem {
  std::vector<int> s_set;
  std::vector<int> merge_map;  // DOF -> merged ordinal, or -1 when pinned
  SparseMat restriction;       // dim x merged_dim, 0/1 entries
  int merged_dim = 0;
};

MergedSystem build_merged(const FemSystem& sys, const std::vector<int>& s_set);

// Full-order solve at any y in (0, inf]^d. Finite y solves the parametric
// stiffness directly; infinite entries are handled exactly through the
// merged system of their index set. All-infinite y returns the zero field.
Field solve_full(const FemSystem& sys, const ParamVector& y,
                 SolveBackend backend = SolveBackend::direct);

// Energy seminorm ||v||_y^2 = sum over finite j of y_j v^T A_j v. Throws
// NumericalError when v carries energy on a subdomain with infinite
// diffusivity (the norm would be infinite). norm_h10 is sqrt(v^T S v).
double norm_y(const FemSystem& sys, const Field& v, const ParamVector& y);
double norm_h10(const FemSystem& sys, const Field& v);

// Energy of v restricted to one subdomain: v^T A_j v.
double subdomain_energy(const FemSystem& sys, const Field& v, int j);

}  // namespace hcrom

#endif
