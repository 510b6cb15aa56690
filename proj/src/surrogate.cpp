#include "hcrom/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include <Eigen/SparseCholesky>

#include "hcrom/errors.hpp"

namespace hcrom {

std::vector<int> SurrogateRect::varying_axes() const {
  std::vector<int> out;
  for (int j = 0; j < dim(); ++j)
    if (kind[j] == AxisKind::varying) out.push_back(j);
  return out;
}

std::vector<int> SurrogateRect::infinite_axes() const {
  std::vector<int> out;
  for (int j = 0; j < dim(); ++j)
    if (kind[j] == AxisKind::infinite) out.push_back(j);
  return out;
}

double SurrogateRect::center(int axis) const {
  switch (kind[axis]) {
    case AxisKind::varying:
      return 1.5 * lower[axis];
    case AxisKind::fixed:
      return lower[axis];
    case AxisKind::infinite:
      return kInf;
  }
  return kInf;
}

bool SurrogateRect::contains(const ParamVector& y) const {
  if (y.dim() != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    const double v = y[j];
    switch (kind[j]) {
      case AxisKind::varying:
        if (!(v >= lower[j] && v <= 2.0 * lower[j])) return false;
        break;
      case AxisKind::infinite:
        if (!(v >= lower[j])) return false;  // inf allowed
        break;
      case AxisKind::fixed:
        if (std::isinf(v) || std::abs(v - lower[j]) > 1e-12 * lower[j]) return false;
        break;
    }
  }
  return true;
}

SurrogateRect SurrogateRect::from_dyadic(const DyadicRectangle& rect,
                                         const std::vector<int>& active_axes, int d) {
  SurrogateRect out;
  out.kind.assign(d, AxisKind::fixed);
  out.lower.assign(d, 1.0);
  if (static_cast<int>(active_axes.size()) != static_cast<int>(rect.ell.size()))
    throw ConfigError("SurrogateRect::from_dyadic: active axes do not match rectangle index");
  for (std::size_t p = 0; p < active_axes.size(); ++p) {
    const int axis = active_axes[p];
    if (axis < 0 || axis >= d) throw ConfigError("SurrogateRect::from_dyadic: axis out of range");
    out.lower[axis] = std::ldexp(1.0, rect.ell[p]);
    out.kind[axis] = rect.ell[p] == rect.level ? AxisKind::infinite : AxisKind::varying;
  }
  return out;
}

SurrogateRect SurrogateRect::all_varying(const std::vector<double>& lower) {
  SurrogateRect out;
  out.kind.assign(lower.size(), AxisKind::varying);
  out.lower = lower;
  return out;
}

std::vector<std::vector<int>> graded_multi_indices(int m, int degree) {
  std::vector<std::vector<int>> out;
  if (m == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> nu(m, 0);
  const std::function<void(int, int)> rec = [&](int p, int budget) {
    if (p == m - 1) {
      for (int c = 0; c <= budget; ++c) {
        nu[p] = c;
        out.push_back(nu);
      }
      nu[p] = 0;
      return;
    }
    for (int c = 0; c <= budget; ++c) {
      nu[p] = c;
      rec(p + 1, budget - c);
    }
    nu[p] = 0;
  };
  rec(0, degree);
  std::sort(out.begin(), out.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    const int sa = std::accumulate(a.begin(), a.end(), 0);
    const int sb = std::accumulate(b.begin(), b.end(), 0);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return out;
}

namespace {

double log_multinomial(const std::vector<int>& nu) {
  const int total = std::accumulate(nu.begin(), nu.end(), 0);
  double v = std::lgamma(total + 1.0);
  for (int c : nu) v -= std::lgamma(c + 1.0);
  return v;
}

}  // namespace

RectangleSurrogate build_rectangle_surrogate(const FemSystem& sys, const SurrogateRect& rect,
                                             int degree) {
  if (rect.dim() != sys.d())
    throw ConfigError("build_rectangle_surrogate: rectangle dimension does not match system");
  if (degree < 0) throw ConfigError("build_rectangle_surrogate: degree must be >= 0");
  for (int j = 0; j < rect.dim(); ++j) {
    if (rect.kind[j] != AxisKind::fixed && rect.lower[j] < 1.0)
      throw ConfigError("build_rectangle_surrogate: rectangle lower bounds must be >= 1");
    if (rect.kind[j] == AxisKind::fixed && !(rect.lower[j] > 0.0))
      throw ConfigError("build_rectangle_surrogate: fixed axis values must be positive");
  }

  RectangleSurrogate surr;
  surr.rect = rect;
  surr.degree = degree;
  const std::vector<int> varying = rect.varying_axes();
  const std::vector<int> inf_axes = rect.infinite_axes();
  const int m = static_cast<int>(varying.size());
  surr.indices = graded_multi_indices(m, degree);

  // Operators of the recursion: the full A_j for a finite rectangle, or their
  // merged restrictions R^T A_j R when some axes are sent to infinity.
  const int n = sys.dim();
  std::vector<SparseMat> ops(varying.size());
  SparseMat a_bar;
  Eigen::VectorXd rhs;
  std::shared_ptr<const MergedSystem> merged;

  if (inf_axes.empty()) {
    a_bar = SparseMat(n, n);
    for (int j = 0; j < sys.d(); ++j) a_bar += rect.center(j) * sys.A[j];
    for (int p = 0; p < m; ++p) ops[p] = sys.A[varying[p]];
    rhs = sys.F;
  } else {
    merged = std::make_shared<MergedSystem>(build_merged(sys, inf_axes));
    const SparseMat& r = merged->restriction;
    const SparseMat rt = SparseMat(r.transpose());
    const int nm = merged->merged_dim;
    a_bar = SparseMat(nm, nm);
    for (int j = 0; j < sys.d(); ++j) {
      if (std::find(inf_axes.begin(), inf_axes.end(), j) != inf_axes.end()) continue;
      a_bar += rect.center(j) * SparseMat(rt * sys.A[j] * r);
    }
    for (int p = 0; p < m; ++p) ops[p] = SparseMat(rt * sys.A[varying[p]] * r);
    rhs = rt * sys.F;
  }

  const int nw = static_cast<int>(rhs.size());
  surr.merged = merged;
  std::vector<Eigen::VectorXd> work(surr.indices.size());

  if (nw == 0) {
    // Everything merged away (e.g. all axes infinite on a connected domain).
    for (auto& w : work) w = Eigen::VectorXd::Zero(0);
  } else {
    Eigen::SimplicialLLT<SparseMat> llt(a_bar);
    if (llt.info() != Eigen::Success)
      throw NumericalError("build_rectangle_surrogate: factorization of the center operator failed");

    std::map<std::vector<int>, int> pos;
    for (std::size_t i = 0; i < surr.indices.size(); ++i) pos[surr.indices[i]] = static_cast<int>(i);

    const Eigen::VectorXd g = llt.solve(rhs);
    const double g_bar_sq = g.dot(a_bar * g);
    work[0] = g;

    for (std::size_t i = 1; i < surr.indices.size(); ++i) {
      const std::vector<int>& nu = surr.indices[i];
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(nw);
      std::vector<int> prev = nu;
      for (int p = 0; p < m; ++p) {
        if (nu[p] == 0) continue;
        --prev[p];
        acc.noalias() += ops[p] * work[pos.at(prev)];
        ++prev[p];
      }
      work[i] = -llt.solve(acc);

      // Contraction check: each factor A_ybar^{-1} A_j contracts by 1/ybar_j in the
      // center norm, and v_nu gathers multinomial(nu) operator words.
      double log_bound = log_multinomial(nu);
      for (int p = 0; p < m; ++p) log_bound -= nu[p] * std::log(rect.center(varying[p]));
      const double norm_sq = work[i].dot(a_bar * work[i]);
      if (norm_sq > 0.0 && g_bar_sq > 0.0 &&
          0.5 * (std::log(norm_sq) - std::log(g_bar_sq)) > log_bound + std::log(10.0)) {
        throw NumericalError("build_rectangle_surrogate: coefficient growth exceeds the contraction bound");
      }
    }
  }

  surr.coeff.resize(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (merged)
      surr.coeff[i] = nw == 0 ? Field(Field::Zero(n)) : Field(merged->restriction * work[i]);
    else
      surr.coeff[i] = work[i];
  }
  return surr;
}

Field evaluate_surrogate(const RectangleSurrogate& surr, const ParamVector& y) {
  if (!surr.rect.contains(y))
    throw ConfigError("evaluate_surrogate: parameter lies outside the surrogate rectangle");
  const std::vector<int> varying = surr.rect.varying_axes();
  const int m = static_cast<int>(varying.size());
  Eigen::VectorXd shift(m);
  for (int p = 0; p < m; ++p) shift[p] = y[varying[p]] - surr.rect.center(varying[p]);

  // Graded evaluation with cached monomials: each multi-index reuses the monomial
  // of its predecessor nu - e_p for the first nonzero slot p.
  std::map<std::vector<int>, double> mono;
  Field out = Field::Zero(surr.coeff.front().size());
  for (std::size_t i = 0; i < surr.indices.size(); ++i) {
    const std::vector<int>& nu = surr.indices[i];
    double value = 1.0;
    int first = -1;
    for (int p = 0; p < m; ++p)
      if (nu[p] > 0) {
        first = p;
        break;
      }
    if (first >= 0) {
      std::vector<int> prev = nu;
      --prev[first];
      value = mono.at(prev) * shift[first];
    }
    mono[nu] = value;
    out.noalias() += value * surr.coeff[i];
  }
  return out;
}

Eigen::MatrixXd h10_orthonormalize(const SparseMat& gram, const Eigen::MatrixXd& fields,
                                   double rel_tol) {
  const Eigen::Index n = fields.rows();
  Eigen::MatrixXd basis(n, fields.cols());
  int dim = 0;
  double max_norm = 0.0;
  for (Eigen::Index c = 0; c < fields.cols(); ++c)
    max_norm = std::max(max_norm, std::sqrt(std::max(fields.col(c).dot(gram * fields.col(c)), 0.0)));
  if (max_norm == 0.0) return Eigen::MatrixXd(n, 0);

  for (Eigen::Index c = 0; c < fields.cols(); ++c) {
    Eigen::VectorXd v = fields.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd gv = gram * v;
      for (int b = 0; b < dim; ++b) v -= basis.col(b).dot(gv) * basis.col(b);
    }
    const double norm = std::sqrt(std::max(v.dot(gram * v), 0.0));
    if (norm > rel_tol * max_norm) basis.col(dim++) = v / norm;
  }
  return basis.leftCols(dim);
}

LocalSpace build_local_space(const FemSystem& sys, const RectangleSurrogate& surr) {
  LocalSpace space;
  space.rect = surr.rect;
  Eigen::MatrixXd fields(sys.dim(), surr.coeff.size());
  for (std::size_t i = 0; i < surr.coeff.size(); ++i) fields.col(i) = surr.coeff[i];
  space.basis = h10_orthonormalize(sys.S, fields, 1e-10);
  space.dim = static_cast<int>(space.basis.cols());
  return space;
}

GlobalSpace build_global_space(const FemSystem& sys, int degree, double c0,
                               const std::vector<int>& active_axes) {
  if (active_axes.empty()) throw ConfigError("build_global_space: no active axes");
  GlobalSpace gs;
  gs.degree = degree;
  gs.active_axes = active_axes;
  const RectangleCover cover =
      enumerate_cover(static_cast<int>(active_axes.size()), degree, c0);
  gs.level = cover.level;

  std::vector<Eigen::MatrixXd> pieces;
  Eigen::Index total = 0;
  for (const std::vector<int>& ell : cover.boundary_indices) {
    DyadicRectangle rect;
    rect.ell = ell;
    rect.level = cover.level;
    const SurrogateRect sr = SurrogateRect::from_dyadic(rect, active_axes, sys.d());
    gs.surrogates.push_back(build_rectangle_surrogate(sys, sr, degree));
    LocalSpace local = build_local_space(sys, gs.surrogates.back());
    local.ell = ell;
    total += local.dim;
    pieces.push_back(local.basis);
    gs.locals.push_back(std::move(local));
  }

  Eigen::MatrixXd stacked(sys.dim(), total);
  Eigen::Index at = 0;
  for (const auto& p : pieces) {
    stacked.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  gs.basis = h10_orthonormalize(sys.S, stacked, 1e-10);
  return gs;
}

GlobalSpace build_global_space(const FemSystem& sys, int degree, double c0) {
  std::vector<int> all(sys.d());
  std::iota(all.begin(), all.end(), 0);
  return build_global_space(sys, degree, c0, all);
}

}  // namespace hcrom
