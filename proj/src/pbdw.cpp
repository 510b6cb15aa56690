#include "hcrom/pbdw.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hcrom/errors.hpp"
#include "hcrom/solver.hpp"
#include "hcrom/surrogate.hpp"

namespace hcrom {

namespace {

using Poly = std::vector<Eigen::Vector2d>;

// Clip a convex polygon against the half-plane sign * (p[axis] - bound) <= 0.
Poly clip_halfplane(const Poly& poly, int axis, double bound, double sign) {
  Poly out;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& cur = poly[i];
    const Eigen::Vector2d& nxt = poly[(i + 1) % n];
    const double dc = sign * (cur[axis] - bound);
    const double dn = sign * (nxt[axis] - bound);
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

Poly clip_to_rect(Poly poly, double x0, double x1, double y0, double y1) {
  poly = clip_halfplane(poly, 0, x0, -1.0);
  poly = clip_halfplane(poly, 0, x1, 1.0);
  poly = clip_halfplane(poly, 1, y0, -1.0);
  poly = clip_halfplane(poly, 1, y1, 1.0);
  return poly;
}

double polygon_area(const Poly& poly, Eigen::Vector2d& centroid) {
  double a2 = 0.0;
  Eigen::Vector2d c(0.0, 0.0);
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % n];
    const double cross = p.x() * q.y() - q.x() * p.y();
    a2 += cross;
    c += cross * (p + q);
  }
  if (std::abs(a2) < 1e-300) {
    centroid.setZero();
    return 0.0;
  }
  centroid = c / (3.0 * a2);
  return 0.5 * a2;
}

}  // namespace

MeasurementSuite build_suite(const FemSystem& sys, const SensorSpec& spec) {
  if (spec.grid < 1) throw ConfigError("build_suite: sensor grid must be >= 1");
  if (!(spec.side > 0.0) || spec.side > 2.0)
    throw ConfigError("build_suite: sensor side must be in (0, 2]");

  MeasurementSuite suite;
  suite.sensor_spec = spec;
  suite.m = spec.grid * spec.grid;
  const StructuredMesh& mesh = sys.mesh;
  const int n = sys.dim();

  for (int gy = 0; gy < spec.grid; ++gy) {
    for (int gx = 0; gx < spec.grid; ++gx) {
      const double cx = -1.0 + (gx + 0.5) * 2.0 / spec.grid;
      const double cy = -1.0 + (gy + 0.5) * 2.0 / spec.grid;
      const double x0 = cx - 0.5 * spec.side, x1 = cx + 0.5 * spec.side;
      const double y0 = cy - 0.5 * spec.side, y1 = cy + 0.5 * spec.side;

      Eigen::VectorXd ell = Eigen::VectorXd::Zero(n);
      double total_area = 0.0;
      for (const std::array<int, 3>& tri : mesh.triangles) {
        const Eigen::Vector2d p0 = mesh.vertices[tri[0]];
        const Eigen::Vector2d p1 = mesh.vertices[tri[1]];
        const Eigen::Vector2d p2 = mesh.vertices[tri[2]];
        Poly clipped = clip_to_rect({p0, p1, p2}, x0, x1, y0, y1);
        if (clipped.size() < 3) continue;
        Eigen::Vector2d centroid;
        const double area = polygon_area(clipped, centroid);
        if (!(area > 0.0)) continue;
        total_area += area;

        // Exact integral of a P1 function over the clipped polygon: linear
        // integrand, so area times the value at the centroid; the value of
        // each hat at the centroid is its barycentric coordinate.
        const double twice = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        const double lam[3] = {
            ((p1 - centroid).x() * (p2 - centroid).y() -
             (p2 - centroid).x() * (p1 - centroid).y()) / twice,
            ((p2 - centroid).x() * (p0 - centroid).y() -
             (p0 - centroid).x() * (p2 - centroid).y()) / twice,
            ((p0 - centroid).x() * (p1 - centroid).y() -
             (p1 - centroid).x() * (p0 - centroid).y()) / twice,
        };
        for (int a = 0; a < 3; ++a) {
          const int dof = mesh.interior_dof[tri[a]];
          if (dof >= 0) ell[dof] += area * lam[a];
        }
      }
      if (!(total_area > 0.0))
        throw ConfigError("build_suite: sensor square has empty intersection with the domain");
      suite.functionals.push_back(ell / total_area);
    }
  }

  for (const Eigen::VectorXd& ell : suite.functionals)
    suite.omegas.push_back(spd_solve(sys.S, ell));

  // Reject degenerate sensor layouts up front.
  Eigen::MatrixXd gram(suite.m, suite.m);
  for (int i = 0; i < suite.m; ++i)
    for (int j = 0; j < suite.m; ++j) gram(i, j) = suite.functionals[i].dot(suite.omegas[j]);
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lam_min = eig.eigenvalues().minCoeff();
  const double lam_max = eig.eigenvalues().maxCoeff();
  if (!(lam_min > 0.0) || lam_max / lam_min > 1e12) {
    throw ConfigError(
        "build_suite: dependent or duplicate sensors; representer Gram condition number = " +
        std::to_string(lam_min > 0.0 ? lam_max / lam_min : kInf));
  }
  return suite;
}

Eigen::VectorXd measure(const MeasurementSuite& suite, const Field& u) {
  Eigen::VectorXd w(suite.m);
  for (int i = 0; i < suite.m; ++i) w[i] = suite.functionals[i].dot(u);
  return w;
}

double inf_sup_mu(const FemSystem& sys, const Eigen::MatrixXd& v_basis,
                  const Eigen::MatrixXd& w_basis) {
  const Eigen::MatrixXd v_on = h10_orthonormalize(sys.S, v_basis);
  const Eigen::MatrixXd w_on = h10_orthonormalize(sys.S, w_basis);
  if (v_on.cols() == 0) return 1.0;  // trivial V is reproduced exactly
  if (w_on.cols() < v_on.cols()) return kInf;
  const Eigen::MatrixXd cross = v_on.transpose() * (sys.S * w_on);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
  const double sigma_min = svd.singularValues().minCoeff();
  if (sigma_min <= 1e-13) return kInf;
  return 1.0 / sigma_min;
}

PbdwSystem build_pbdw(const FemSystem& sys, ReducedBasis rb, MeasurementSuite suite) {
  PbdwSystem p;
  p.rb = std::move(rb);
  p.suite = std::move(suite);
  const int m = p.suite.m;
  const int n = p.rb.n();
  p.G.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) p.G(i, j) = p.suite.functionals[i].dot(p.suite.omegas[j]);
  p.G = 0.5 * (p.G + p.G.transpose()).eval();
  p.C.resize(m, n);
  for (int i = 0; i < m; ++i) p.C.row(i) = p.suite.functionals[i].transpose() * p.rb.Q;

  Eigen::MatrixXd w_basis(sys.dim(), m);
  for (int i = 0; i < m; ++i) w_basis.col(i) = p.suite.omegas[i];
  p.mu_n = inf_sup_mu(sys, p.rb.Q, w_basis);
  return p;
}

PbdwResult pbdw_reconstruct(const PbdwSystem& p, const Eigen::VectorXd& w) {
  const int m = p.suite.m;
  const int n = p.rb.n();
  if (w.size() != m) throw ConfigError("pbdw_reconstruct: measurement vector has wrong length");
  if (std::isinf(p.mu_n))
    throw NumericalError(
        "pbdw_reconstruct: mu_n is infinite (V_n has a direction invisible to the sensors); "
        "add sensors or truncate the basis");

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + n, m + n);
  kkt.topLeftCorner(m, m) = p.G;
  kkt.topRightCorner(m, n) = p.C;
  kkt.bottomLeftCorner(n, m) = p.C.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + n);
  rhs.head(m) = w;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    const Eigen::MatrixXd kernel = lu.kernel();
    int worst = 0;
    kernel.col(0).tail(n).cwiseAbs().maxCoeff(&worst);
    throw NumericalError(
        "pbdw_reconstruct: singular saddle system; reduced-basis direction " +
        std::to_string(worst) + " is invisible to the sensors");
  }
  const Eigen::VectorXd sol = lu.solve(rhs);

  PbdwResult out;
  out.eta = sol.head(m);
  out.c = sol.tail(n);
  out.v_star = p.rb.Q * out.c;
  out.u_star = out.v_star;
  for (int i = 0; i < m; ++i) out.u_star += out.eta[i] * p.suite.omegas[i];
  return out;
}

bool ParamEstimate::any_failed() const {
  return std::any_of(negative.begin(), negative.end(), [](bool b) { return b; });
}

ParamVector ParamEstimate::param() const {
  if (any_failed())
    throw NumericalError("parameter estimate has negative inverse-diffusivity components");
  return ParamVector(y_star);
}

ParamEstimate estimate_params(const PbdwSystem& p, const Eigen::VectorXd& w) {
  const PbdwResult rec = pbdw_reconstruct(p, w);
  const int n = p.rb.n();
  const int d = static_cast<int>(p.rb.A_hat.size());

  // v_star in snapshot coordinates: sorted snapshots = Q R, so c_snap = R^{-1} c_Q.
  const Eigen::VectorXd rdiag = p.rb.R.diagonal().cwiseAbs();
  if (rdiag.minCoeff() <= 1e-14 * rdiag.maxCoeff())
    throw NumericalError(
        "estimate_params: snapshot fields are numerically dependent; truncate the basis");
  const Eigen::VectorXd c =
      p.rb.R.triangularView<Eigen::Upper>().solve(rec.c);

  ParamEstimate est;
  est.c_snapshot = c;
  est.s.assign(d, 0.0);
  est.y_star.assign(d, 0.0);
  est.negative.assign(d, false);
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double yij = p.rb.sorted[i].y[j];
      if (!std::isinf(yij)) s += c[i] / yij;
    }
    est.s[j] = s;
    if (s > 1e-12) {
      est.y_star[j] = 1.0 / s;
    } else if (s >= -1e-12) {
      est.y_star[j] = kInf;
    } else {
      est.y_star[j] = kInf;
      est.negative[j] = true;
    }
  }
  return est;
}

}  // namespace hcrom
