#ifndef HCROM_SURROGATE_HPP
#define HCROM_SURROGATE_HPP

#include <memory>
#include <vector>

#include "hcrom/fem_system.hpp"
#include "hcrom/param.hpp"
#include "hcrom/solver.hpp"

namespace hcrom {

// Role of one parameter axis within a surrogate rectangle.
enum class AxisKind {
  varying,   // y_j ranges over [lower, 2*lower]
  infinite,  // y_j = inf (merged out); evaluation accepts y_j in [lower, inf]
  fixed,     // y_j pinned at lower
};

// Rectangle R = prod over varying axes of [a_j, 2a_j], with the remaining axes
// either pinned at a value or sent to infinity (stiff-inclusion limit).
struct SurrogateRect {
  std::vector<AxisKind> kind;
  std::vector<double> lower;

  int dim() const { return static_cast<int>(kind.size()); }
  std::vector<int> varying_axes() const;
  std::vector<int> infinite_axes() const;
  // Series center: 3/2 * lower on varying axes, the pinned value on fixed axes.
  double center(int axis) const;
  bool contains(const ParamVector& y) const;

  // Dyadic rectangle of a cover, with non-active axes pinned at 1. Axes at the
  // top level become infinite tails [2^level, inf].
  static SurrogateRect from_dyadic(const DyadicRectangle& rect, const std::vector<int>& active_axes,
                                   int d);
  static SurrogateRect all_varying(const std::vector<double>& lower);
};

// Truncated Neumann-series polynomial: u_k(y) = sum_{|nu|<=k} v_nu * (y - ybar)^nu,
// with nu running over the varying axes. Coefficients are stored as full nodal
// fields; for rectangles with infinite axes they lie in the merged space.
struct RectangleSurrogate {
  SurrogateRect rect;
  int degree = 0;
  std::vector<std::vector<int>> indices;  // graded-lex multi-indices over varying axes
  std::vector<Field> coeff;               // v_nu, aligned with indices
  std::shared_ptr<const MergedSystem> merged;  // set when rect has infinite axes
};

// All multi-indices of length m with |nu| <= degree, in graded lexicographic order.
std::vector<std::vector<int>> graded_multi_indices(int m, int degree);

RectangleSurrogate build_rectangle_surrogate(const FemSystem& sys, const SurrogateRect& rect,
                                             int degree);

Field evaluate_surrogate(const RectangleSurrogate& surr, const ParamVector& y);

// H10-orthonormalized span of the surrogate coefficients (the local reduced space).
struct LocalSpace {
  SurrogateRect rect;
  std::vector<int> ell;  // dyadic index when built from a cover (empty otherwise)
  Eigen::MatrixXd basis;
  int dim = 0;
};

LocalSpace build_local_space(const FemSystem& sys, const RectangleSurrogate& surr);

// Union of local spaces over the boundary set E_k of a dyadic cover, plus the
// orthonormalized direct-sum basis.
struct GlobalSpace {
  int degree = 0;
  int level = 0;
  std::vector<int> active_axes;
  std::vector<RectangleSurrogate> surrogates;
  std::vector<LocalSpace> locals;
  Eigen::MatrixXd basis;
};

GlobalSpace build_global_space(const FemSystem& sys, int degree, double c0,
                               const std::vector<int>& active_axes);
GlobalSpace build_global_space(const FemSystem& sys, int degree, double c0);

// Orthonormalize the columns of fields in the S-weighted (H10) inner product with
// a relative rank tolerance; returns the accepted columns.
Eigen::MatrixXd h10_orthonormalize(const SparseMat& gram, const Eigen::MatrixXd& fields,
                                   double rel_tol = 1e-10);

}  // namespace hcrom

#endif
