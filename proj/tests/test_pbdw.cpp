#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "hcrom/errors.hpp"
#include "hcrom/pbdw.hpp"
#include "hcrom/solver.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace hcrom;

namespace {

FemSystem make_sys(int cells) {
  return assemble(build_mesh(cells), make_partition("lipschitz4", 4));
}

ReducedBasis snapshot_basis(const FemSystem& sys, const std::vector<const char*>& params) {
  std::vector<Snapshot> snaps;
  for (const char* s : params) {
    const ParamVector y = ParamVector::parse(s);
    snaps.push_back({y, solve_full(sys, y)});
  }
  return assemble_basis(sys, snaps);
}

}  // namespace

TEST_SUITE("pbdw") {

TEST_CASE("sensor suite") {
  const FemSystem sys = make_sys(16);
  const MeasurementSuite suite = build_suite(sys, SensorSpec{4, 0.25});
  CHECK(suite.m == 16);
  REQUIRE(suite.functionals.size() == 16);
  REQUIRE(suite.omegas.size() == 16);

  // Every sensor square lies inside [-7/8, 7/8]^2, where the all-ones nodal
  // field is identically one, so each average evaluates to 1.
  const Eigen::VectorXd avg = measure(suite, Field::Ones(sys.dim()));
  for (int i = 0; i < suite.m; ++i) CHECK(avg[i] == doctest::Approx(1.0).epsilon(1e-13));

  // Riesz property <omega_i, v>_S = l_i(v), and linearity of measure.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Field v(sys.dim());
  for (int i = 0; i < sys.dim(); ++i) v[i] = gauss(rng);
  for (int i = 0; i < suite.m; ++i)
    CHECK(suite.omegas[i].dot(sys.S * v) ==
          doctest::Approx(suite.functionals[i].dot(v)).epsilon(1e-10));
  const Field u = solve_full(sys, ParamVector::parse("2,1,1,1"));
  CHECK((measure(suite, u + v) - measure(suite, u) - measure(suite, v)).cwiseAbs().maxCoeff() <
        1e-12 * measure(suite, v).cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(build_suite(sys, SensorSpec{0, 0.25}), ConfigError);
  CHECK_THROWS_AS(build_suite(sys, SensorSpec{4, 0.0}), ConfigError);
  CHECK_THROWS_AS(build_suite(sys, SensorSpec{4, 2.5}), ConfigError);

  // More sensors than interior DOFs: the representer Gram is singular.
  const FemSystem tiny = make_sys(4);
  const std::string msg = thrown_message<ConfigError>(
      [&] { build_suite(tiny, SensorSpec{16, 0.125}); });
  CHECK(msg.find("dependent or duplicate sensors") != std::string::npos);
}

TEST_CASE("stability constant") {
  const FemSystem sys = make_sys(16);
  const MeasurementSuite suite = build_suite(sys, SensorSpec{4, 0.25});
  Eigen::MatrixXd w_basis(sys.dim(), suite.m);
  for (int i = 0; i < suite.m; ++i) w_basis.col(i) = suite.omegas[i];

  // V inside W is perfectly stable.
  CHECK(inf_sup_mu(sys, w_basis.col(0), w_basis) == doctest::Approx(1.0).epsilon(1e-12));
  // Empty V by convention.
  CHECK(inf_sup_mu(sys, Eigen::MatrixXd(sys.dim(), 0), w_basis) == 1.0);
  // Fewer representers than basis directions.
  CHECK(std::isinf(inf_sup_mu(sys, w_basis.leftCols(2), w_basis.col(0))));

  // A hat function supported between the sensor squares is invisible to all
  // sensors, so the pair (span{hat}, W) is unstable.
  Field hat = Field::Zero(sys.dim());
  hat[sys.mesh.interior_dof[sys.mesh.vertex_index(4, 4)]] = 1.0;
  CHECK(measure(suite, hat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isinf(inf_sup_mu(sys, hat, w_basis)));

  // Agreement with the dense eigenvalue-whitening route.
  const ReducedBasis rb = snapshot_basis(sys, {"1,1,1,1", "8,2,1,1", "inf,1,1,1"});
  const double mu = inf_sup_mu(sys, rb.Q, w_basis);
  REQUIRE(std::isfinite(mu));
  CHECK(mu >= 1.0 - 1e-12);
  const double dense = oracle::dense_mu(Eigen::MatrixXd(sys.S), rb.Q, w_basis);
  CHECK(mu == doctest::Approx(dense).epsilon(1e-10));
}

TEST_CASE("reconstruction") {
  const FemSystem sys = make_sys(16);
  const MeasurementSuite suite = build_suite(sys, SensorSpec{4, 0.25});
  const ReducedBasis rb = snapshot_basis(sys, {"1,1,1,1", "8,2,1,1", "inf,1,1,1", "2,2,16,1"});
  const PbdwSystem p = build_pbdw(sys, rb, suite);
  REQUIRE(std::isfinite(p.mu_n));
  CHECK(p.G.rows() == 16);
  CHECK(p.C.cols() == 4);

  // Truth inside V_n with m >= n: exact recovery.
  for (const Snapshot& snap : p.rb.sorted) {
    const PbdwResult rec = pbdw_reconstruct(p, measure(suite, snap.u));
    const double scale = norm_h10(sys, snap.u);
    CHECK(norm_h10(sys, rec.u_star - snap.u) < 1e-10 * scale);
    CHECK(norm_h10(sys, rec.v_star - snap.u) < 1e-10 * scale);
  }

  // The reconstruction interpolates the data: l_i(u_star) = w_i.
  const Field truth = solve_full(sys, ParamVector::parse("3,1.4,7,1"));
  const Eigen::VectorXd w = measure(suite, truth);
  const PbdwResult rec = pbdw_reconstruct(p, w);
  CHECK((measure(suite, rec.u_star) - w).cwiseAbs().maxCoeff() < 1e-10 * w.cwiseAbs().maxCoeff());

  // v_star obeys the stability bound against the best approximation in V_n.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> entries(4);
    for (double& e : entries) e = 1.0 / std::max(unif(rng), 1e-3);
    const ParamVector y{entries};
    const Field u = solve_full(sys, y);
    const PbdwResult r = pbdw_reconstruct(p, measure(suite, u));
    const double dist = norm_h10(sys, u - h10_project(sys, p.rb, u));
    CHECK(norm_h10(sys, u - r.v_star) <= p.mu_n * dist * (1.0 + 1e-8) + 1e-13);
  }

  CHECK_THROWS_AS(pbdw_reconstruct(p, Eigen::VectorXd::Zero(5)), ConfigError);

  // Unstable pair: reconstruction refuses to run.
  Field hat = Field::Zero(sys.dim());
  hat[sys.mesh.interior_dof[sys.mesh.vertex_index(4, 4)]] = 1.0;
  const PbdwSystem bad = build_pbdw(sys, basis_from_columns(sys, hat), suite);
  CHECK(std::isinf(bad.mu_n));
  const std::string msg = thrown_message<NumericalError>(
      [&] { pbdw_reconstruct(bad, Eigen::VectorXd::Zero(16)); });
  CHECK(msg.find("add sensors") != std::string::npos);
}

TEST_CASE("parameter estimation") {
  const FemSystem sys = make_sys(16);
  const MeasurementSuite suite = build_suite(sys, SensorSpec{4, 0.25});
  const ReducedBasis rb = snapshot_basis(sys, {"1,1,1,1", "8,2,1,1", "inf,1,1,1"});
  const PbdwSystem p = build_pbdw(sys, rb, suite);

  for (const Snapshot& snap : p.rb.sorted) {
    const ParamEstimate est = estimate_params(p, measure(suite, snap.u));
    REQUIRE_FALSE(est.any_failed());
    const ParamVector got = est.param();
    for (int j = 0; j < 4; ++j) {
      if (snap.y.is_infinite(j))
        CHECK(got.is_infinite(j));
      else
        CHECK(got[j] == doctest::Approx(snap.y[j]).epsilon(1e-8));
    }
  }

  // Snapshot coordinates of a snapshot are a Euclidean basis vector.
  const ParamEstimate e0 = estimate_params(p, measure(suite, p.rb.sorted[1].u));
  CHECK(e0.c_snapshot[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(e0.c_snapshot[0]) < 1e-10);
  CHECK(std::abs(e0.c_snapshot[2]) < 1e-10);

  // Negated data produces negative inverse diffusivities on finite axes.
  const ParamEstimate neg = estimate_params(p, -measure(suite, p.rb.sorted[2].u));
  CHECK(neg.any_failed());
  CHECK_THROWS_AS(neg.param(), NumericalError);
  bool some_flag = false;
  for (bool b : neg.negative) some_flag = some_flag || b;
  CHECK(some_flag);

  // A numerically singular snapshot-to-Q map is rejected before inversion.
  PbdwSystem pdup = build_pbdw(sys, snapshot_basis(sys, {"4,1,1,1", "8,1,1,1"}), suite);
  pdup.rb.R(1, 1) = 1e-20;
  const std::string msg = thrown_message<NumericalError>(
      [&] { estimate_params(pdup, measure(suite, pdup.rb.sorted[0].u)); });
  CHECK(msg.find("numerically dependent") != std::string::npos);
}

}  // TEST_SUITE
