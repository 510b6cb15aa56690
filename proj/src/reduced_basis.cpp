#include "hcrom/reduced_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "hcrom/errors.hpp"
#include "hcrom/solver.hpp"

namespace hcrom {

namespace {

void check_axes(int d, const std::vector<int>& active_axes) {
  if (active_axes.empty()) throw ConfigError("training set: active axis list is empty");
  std::set<int> seen;
  for (int a : active_axes) {
    if (a < 0 || a >= d) throw ConfigError("training set: active axis out of range");
    if (!seen.insert(a).second) throw ConfigError("training set: duplicate active axis");
  }
}

void dedup_normalize(std::vector<ParamVector>& params) {
  std::vector<ParamVector> out;
  for (const ParamVector& y : params) {
    // The all-infinite corner is degenerate (u == 0) and cannot be normalized;
    // it arises when every axis is active and infinity is included.
    if (y.all_infinite()) continue;
    const ParamVector yn = normalize(y).second;
    if (std::none_of(out.begin(), out.end(), [&](const ParamVector& z) { return z == yn; }))
      out.push_back(yn);
  }
  params = std::move(out);
}

}  // namespace

TrainingSet make_training_set(int d, const std::vector<int>& active_axes, int grid_size,
                              bool include_infinity) {
  check_axes(d, active_axes);
  if (grid_size < 1) throw ConfigError("training set: grid size must be >= 1");

  std::vector<double> values;  // per-axis diffusivities, from z = 1/y
  if (include_infinity) values.push_back(kInf);
  for (int i = 1; i <= grid_size; ++i) values.push_back(static_cast<double>(grid_size) / i);

  TrainingSet ts;
  ts.sampling_spec = "tensor grid, 1/y uniform with " + std::to_string(values.size()) +
                     " levels per axis" + (include_infinity ? " including infinity" : "");
  const int m = static_cast<int>(active_axes.size());
  std::vector<int> idx(m, 0);
  while (true) {
    std::vector<double> entries(d, 1.0);
    for (int p = 0; p < m; ++p) entries[active_axes[p]] = values[idx[p]];
    ts.params.emplace_back(entries);
    int p = m - 1;
    while (p >= 0 && idx[p] + 1 == static_cast<int>(values.size())) idx[p--] = 0;
    if (p < 0) break;
    ++idx[p];
  }
  dedup_normalize(ts.params);
  return ts;
}

TrainingSet make_random_set(int d, const std::vector<int>& active_axes, int count,
                            std::uint64_t seed, double p_infinity) {
  check_axes(d, active_axes);
  if (count < 1) throw ConfigError("training set: count must be >= 1");
  if (p_infinity < 0.0 || p_infinity >= 1.0)
    throw ConfigError("training set: infinity probability must be in [0,1)");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  TrainingSet ts;
  ts.sampling_spec = "random, 1/y uniform in (0,1]";
  for (int i = 0; i < count; ++i) {
    std::vector<double> entries(d, 1.0);
    for (int a : active_axes) {
      if (p_infinity > 0.0 && unif(rng) < p_infinity) {
        entries[a] = kInf;
      } else {
        double z = unif(rng);
        while (z == 0.0) z = unif(rng);
        entries[a] = 1.0 / z;
      }
    }
    ts.params.emplace_back(entries);
  }
  dedup_normalize(ts.params);
  return ts;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::random_inf: return "random-inf";
    case Strategy::greedy_h10: return "greedy-h10";
    case Strategy::greedy_galerkin: return "greedy-galerkin";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "random") return Strategy::random;
  if (name == "random-inf") return Strategy::random_inf;
  if (name == "greedy-h10") return Strategy::greedy_h10;
  if (name == "greedy-galerkin") return Strategy::greedy_galerkin;
  throw ConfigError("unknown strategy '" + name + "'");
}

bool contrast_before(const ParamVector& a, const ParamVector& b) {
  const double ca = a.contrast(), cb = b.contrast();
  if (ca != cb) return ca > cb;  // +inf compares greater than any finite value
  return std::lexicographical_compare(b.entries().begin(), b.entries().end(),
                                      a.entries().begin(), a.entries().end());
}

ReducedBasis assemble_basis(const FemSystem& sys, std::vector<Snapshot> snapshots) {
  if (snapshots.empty()) throw ConfigError("assemble_basis: no snapshots");
  ReducedBasis rb;
  rb.picked = snapshots;
  std::stable_sort(snapshots.begin(), snapshots.end(),
                   [](const Snapshot& a, const Snapshot& b) { return contrast_before(a.y, b.y); });
  rb.sorted = std::move(snapshots);

  const int n = static_cast<int>(rb.sorted.size());
  Eigen::MatrixXd u(sys.dim(), n);
  for (int i = 0; i < n; ++i) u.col(i) = rb.sorted[i].u;

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  rb.Q = qr.householderQ() * Eigen::MatrixXd::Identity(sys.dim(), n);
  rb.R = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();

  rb.A_hat.resize(sys.d());
  for (int j = 0; j < sys.d(); ++j) {
    const Eigen::MatrixXd m = rb.Q.transpose() * (sys.A[j] * rb.Q);
    rb.A_hat[j] = 0.5 * (m + m.transpose());
  }
  rb.F_hat = rb.Q.transpose() * sys.F;
  const Eigen::MatrixXd sh = rb.Q.transpose() * (sys.S * rb.Q);
  rb.S_hat = 0.5 * (sh + sh.transpose());
  return rb;
}

ReducedBasis basis_from_columns(const FemSystem& sys, Eigen::MatrixXd columns) {
  if (columns.cols() == 0) throw ConfigError("basis_from_columns: empty basis");
  ReducedBasis rb;
  const int n = static_cast<int>(columns.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(std::move(columns));
  rb.Q = qr.householderQ() * Eigen::MatrixXd::Identity(sys.dim(), n);
  rb.R = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
  rb.A_hat.resize(sys.d());
  for (int j = 0; j < sys.d(); ++j) {
    const Eigen::MatrixXd m = rb.Q.transpose() * (sys.A[j] * rb.Q);
    rb.A_hat[j] = 0.5 * (m + m.transpose());
  }
  rb.F_hat = rb.Q.transpose() * sys.F;
  const Eigen::MatrixXd sh = rb.Q.transpose() * (sys.S * rb.Q);
  rb.S_hat = 0.5 * (sh + sh.transpose());
  return rb;
}

namespace {

double relative_error(const ReducedBasis& rb, const FemSystem& sys, const ParamVector& y,
                      const Field& u, double u_norm, ErrorKind kind) {
  const Field approx =
      kind == ErrorKind::h10 ? h10_project(sys, rb, u) : galerkin_project(rb, y);
  return norm_h10(sys, u - approx) / u_norm;
}

// The point whose active (non-unit) entries are all infinite; the random-inf
// strategy seeds the basis with its limit solution.
int find_all_infinite_point(const TrainingSet& training) {
  int found = -1;
  for (int i = 0; i < static_cast<int>(training.params.size()); ++i) {
    const ParamVector& y = training.params[i];
    if (y.infinite_set().empty()) continue;
    bool ok = true;
    for (int j = 0; j < y.dim(); ++j)
      if (!y.is_infinite(j) && y[j] != 1.0) ok = false;
    if (ok && (found < 0 || contrast_before(y, training.params[found]))) found = i;
  }
  return found;
}

}  // namespace

ReducedBasis select(Strategy strategy, const FemSystem& sys, const TrainingSet& training,
                    int n_max, std::uint64_t seed) {
  const int size = static_cast<int>(training.params.size());
  if (size == 0) throw ConfigError("select: training set is empty");
  if (n_max < 1 || n_max > size)
    throw ConfigError("select: n_max must be in [1, #training] = [1, " + std::to_string(size) +
                      "], got " + std::to_string(n_max));

  if (strategy == Strategy::random || strategy == Strategy::random_inf) {
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    if (strategy == Strategy::random_inf) {
      const int forced = find_all_infinite_point(training);
      if (forced < 0)
        throw ConfigError("select: random-inf strategy needs an all-infinite training point");
      idx.erase(std::remove(idx.begin(), idx.end(), forced), idx.end());
      idx.insert(idx.begin(), forced);
    }
    std::vector<Snapshot> snaps;
    for (int p = 0; p < n_max; ++p)
      snaps.push_back({training.params[idx[p]], solve_full(sys, training.params[idx[p]])});
    return assemble_basis(sys, std::move(snaps));
  }

  // Greedy: cache every training solution once, then grow the basis by the
  // worst relative error of the requested projection.
  const ErrorKind kind = strategy == Strategy::greedy_h10 ? ErrorKind::h10 : ErrorKind::galerkin;
  std::vector<Field> fields(size);
  std::vector<double> norms(size);
  for (int i = 0; i < size; ++i) {
    fields[i] = solve_full(sys, training.params[i]);
    norms[i] = norm_h10(sys, fields[i]);
    if (!(norms[i] > 0.0)) throw NumericalError("select: training solution with zero energy");
  }

  // First pick: max contrast, ties by lexicographically smaller entries.
  int first = 0;
  for (int i = 1; i < size; ++i) {
    const ParamVector& a = training.params[i];
    const ParamVector& b = training.params[first];
    if (a.contrast() > b.contrast() ||
        (a.contrast() == b.contrast() &&
         std::lexicographical_compare(a.entries().begin(), a.entries().end(),
                                      b.entries().begin(), b.entries().end())))
      first = i;
  }

  std::vector<Snapshot> snaps{{training.params[first], fields[first]}};
  std::vector<bool> taken(size, false);
  taken[first] = true;
  ReducedBasis rb = assemble_basis(sys, snaps);

  while (true) {
    double worst = 0.0;
    double worst_untaken = -1.0;
    int arg = -1;
    for (int i = 0; i < size; ++i) {
      const double err = relative_error(rb, sys, training.params[i], fields[i], norms[i], kind);
      worst = std::max(worst, err);
      if (!taken[i] && err > worst_untaken) {
        worst_untaken = err;
        arg = i;
      }
    }
    rb.final_error = worst;
    if (worst < 1e-14) {
      rb.stop_reason = "max relative training error below the 1e-14 machine-precision floor";
      break;
    }
    if (static_cast<int>(snaps.size()) >= n_max || arg < 0) break;
    snaps.push_back({training.params[arg], fields[arg]});
    taken[arg] = true;
    rb = assemble_basis(sys, snaps);
  }
  return rb;
}

Field h10_project(const FemSystem& sys, const ReducedBasis& rb, const Field& u) {
  if (rb.n() == 0) throw ConfigError("h10_project: empty basis");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(rb.S_hat);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("h10_project: reduced Gram matrix is not positive definite");
  return rb.Q * ldlt.solve(rb.Q.transpose() * (sys.S * u));
}

Field galerkin_project(const ReducedBasis& rb, const ParamVector& y, std::string* diagnostic) {
  if (rb.n() == 0) throw ConfigError("galerkin_project: empty basis");
  if (diagnostic) diagnostic->clear();
  const int n = rb.n();
  if (y.all_infinite()) return Field::Zero(rb.Q.rows());

  const auto [t, yn] = normalize(y);
  const double scale = 1.0 / t;
  const std::vector<int> s = yn.infinite_set();

  if (s.empty()) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < yn.dim(); ++j) m += yn[j] * rb.A_hat[j];
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError("galerkin_project: reduced operator factorization failed");
    return scale * (rb.Q * ldlt.solve(rb.F_hat));
  }

  // Stiff limit inside the reduced space. Snapshots solved with infinity on a
  // superset of S lie in V_S exactly, so for snapshot-built bases V_n cap V_S
  // is their span, read off through the R coordinates. An eigenvalue cutoff on
  // the reduced S-block cannot replace this: once the basis approximates the
  // limit beyond ~1e-8, the corresponding eigenvalue drowns in the same
  // rounding floor as genuine stiff content.
  Eigen::MatrixXd kernel(n, 0);
  if (!rb.sorted.empty()) {
    std::vector<int> stiff;
    for (int i = 0; i < n; ++i) {
      const ParamVector& yi = rb.sorted[i].y;
      if (std::all_of(s.begin(), s.end(), [&](int j) { return yi.is_infinite(j); }))
        stiff.push_back(i);
    }
    if (!stiff.empty()) {
      Eigen::MatrixXd d(n, static_cast<int>(stiff.size()));
      for (std::size_t c = 0; c < stiff.size(); ++c) d.col(c) = rb.R.col(stiff[c]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
      const int rank = static_cast<int>(qr.rank());
      kernel = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
    }
  } else {
    // Span-only basis: fall back to the numerical kernel of the S-block. Such
    // bases carry stiff content either exactly (rounding-level eigenvalues) or
    // through approximations far above this cutoff, so the split is clean.
    Eigen::MatrixXd a_s = Eigen::MatrixXd::Zero(n, n);
    for (int j : s) a_s += rb.A_hat[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_s);
    if (eig.info() != Eigen::Success)
      throw NumericalError("galerkin_project: eigendecomposition of the stiff block failed");
    const double lam_max = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    int kdim = 0;
    while (kdim < n && eig.eigenvalues()[kdim] <= 1e-12 * lam_max) ++kdim;
    kernel = eig.eigenvectors().leftCols(kdim);
  }

  if (kernel.cols() == 0) {
    if (diagnostic) {
      std::string idx;
      for (int j : s) idx += (idx.empty() ? "" : ",") + std::to_string(j);
      *diagnostic =
          "V_n ∩ V_S trivial: the reduced space has no stiff-limit content for S={" + idx + "}";
    }
    return Field::Zero(rb.Q.rows());
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < yn.dim(); ++j)
    if (!yn.is_infinite(j)) m += yn[j] * rb.A_hat[j];
  const Eigen::MatrixXd mk = kernel.transpose() * m * kernel;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(mk);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("galerkin_project: restricted reduced operator factorization failed");
  return scale * (rb.Q * (kernel * ldlt.solve(kernel.transpose() * rb.F_hat)));
}

std::vector<ErrorStudyRow> error_study(const ReducedBasis& rb, const FemSystem& sys,
                                       const TrainingSet& test, ErrorKind which) {
  const int size = static_cast<int>(test.params.size());
  if (size == 0) throw ConfigError("error_study: empty test set");
  std::vector<Field> fields(size);
  std::vector<double> norms(size);
  for (int i = 0; i < size; ++i) {
    fields[i] = solve_full(sys, test.params[i]);
    norms[i] = norm_h10(sys, fields[i]);
  }

  std::vector<ErrorStudyRow> rows;
  for (int n = 1; n <= static_cast<int>(rb.picked.size()); ++n) {
    std::vector<Snapshot> head(rb.picked.begin(), rb.picked.begin() + n);
    const ReducedBasis sub = assemble_basis(sys, std::move(head));
    double worst = 0.0;
    for (int i = 0; i < size; ++i)
      worst =
          std::max(worst, relative_error(sub, sys, test.params[i], fields[i], norms[i], which));
    rows.push_back({n, worst});
  }
  return rows;
}

}  // namespace hcrom
