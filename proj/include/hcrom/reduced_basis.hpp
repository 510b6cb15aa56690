#ifndef HCROM_REDUCED_BASIS_HPP
#define HCROM_REDUCED_BASIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hcrom/fem_system.hpp"
#include "hcrom/param.hpp"

namespace hcrom {

struct TrainingSet {
  std::vector<ParamVector> params;  // normalized, deduplicated, never all-infinite
  std::string sampling_spec;
};

// Tensor grid, uniform in the inverse parameters z_j = 1/y_j in {0, 1/T, ..., 1}
// on the active axes (z = 0 encodes infinity); frozen axes pinned at 1.
TrainingSet make_training_set(int d, const std::vector<int>& active_axes, int grid_size,
                              bool include_infinity);

// Random parameters with 1/y_j uniform in (0, 1] on active axes; each active entry
// is infinite with probability p_infinity. Frozen axes pinned at 1.
TrainingSet make_random_set(int d, const std::vector<int>& active_axes, int count,
                            std::uint64_t seed, double p_infinity);

enum class Strategy { random, random_inf, greedy_h10, greedy_galerkin };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct Snapshot {
  ParamVector y;
  Field u;
};

struct ReducedBasis {
  std::vector<Snapshot> picked;  // in selection order
  std::vector<Snapshot> sorted;  // contrast-descending order used for the QR factor
  Eigen::MatrixXd Q;             // l2-orthonormal; sorted snapshot fields = Q * R
  Eigen::MatrixXd R;
  std::vector<Eigen::MatrixXd> A_hat;  // Q^T A_j Q
  Eigen::VectorXd F_hat;               // Q^T F
  Eigen::MatrixXd S_hat;               // Q^T S Q
  std::string stop_reason;             // nonempty when greedy stopped before n_max
  double final_error = -1.0;           // greedy: max relative training error of the final basis

  int n() const { return static_cast<int>(Q.cols()); }
};

// Contrast-descending comparison (infinite contrast first; ties lexicographic,
// larger entries first) — the snapshot order fed to the QR factorization.
bool contrast_before(const ParamVector& a, const ParamVector& b);

// Sort snapshots by descending contrast, QR-factorize, and form the reduced operators.
ReducedBasis assemble_basis(const FemSystem& sys, std::vector<Snapshot> snapshots);

// Reduced operators over an explicit column basis (no snapshot bookkeeping);
// lets the projection routines run on surrogate-built spaces.
ReducedBasis basis_from_columns(const FemSystem& sys, Eigen::MatrixXd columns);

ReducedBasis select(Strategy strategy, const FemSystem& sys, const TrainingSet& training,
                    int n_max, std::uint64_t seed);

// H10-orthogonal projection of a field onto span(Q). Q is l2-orthonormal,
// so the normal equations are S_hat c = Q^T S u and the full Gram is needed.
Field h10_project(const FemSystem& sys, const ReducedBasis& rb, const Field& u);

// Reduced Galerkin solution at y (homogeneity applied internally). At parameters
// with infinite set S the solve is restricted to V_n cap V_S: for snapshot-built
// bases, the span of snapshots whose parameters are infinite on all of S; for
// span-only bases, the numerical kernel of sum_{j in S} A_hat_j. An empty
// intersection returns the zero field and sets *diagnostic.
Field galerkin_project(const ReducedBasis& rb, const ParamVector& y,
                       std::string* diagnostic = nullptr);

enum class ErrorKind { h10, galerkin };

struct ErrorStudyRow {
  int n;
  double max_rel_err;
};

// Max relative H10 error over the test set for the nested bases built from the
// first n picked snapshots, n = 1..#picked.
std::vector<ErrorStudyRow> error_study(const ReducedBasis& rb, const FemSystem& sys,
                                       const TrainingSet& test, ErrorKind which);

}  // namespace hcrom

#endif
