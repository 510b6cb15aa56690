#ifndef HCROM_PBDW_HPP
#define HCROM_PBDW_HPP

#include <string>
#include <vector>

#include "hcrom/fem_system.hpp"
#include "hcrom/reduced_basis.hpp"

namespace hcrom {

// Uniform grid x grid layout of square sensors over the domain; each sensor
// measures the average of the field over an axis-aligned square of the given
// side centered at its grid point (clipped to the domain).
struct SensorSpec {
  int grid = 4;
  double side = 0.25;
};

struct MeasurementSuite {
  SensorSpec sensor_spec;
  int m = 0;
  std::vector<Eigen::VectorXd> functionals;  // dual vectors l_i over interior DOFs
  std::vector<Field> omegas;                 // Riesz representers, S w_i = l_i
};

MeasurementSuite build_suite(const FemSystem& sys, const SensorSpec& spec);

// Apply every sensor functional to a field.
Eigen::VectorXd measure(const MeasurementSuite& suite, const Field& u);

// Stability constant of the (V, W) pair: 1/sigma_min of the cross-Gram of
// H10-orthonormalized bases; +inf when sigma_min <= 1e-13 (or when W has
// fewer columns than V).
double inf_sup_mu(const FemSystem& sys, const Eigen::MatrixXd& v_basis,
                  const Eigen::MatrixXd& w_basis);

struct PbdwSystem {
  ReducedBasis rb;
  MeasurementSuite suite;
  Eigen::MatrixXd G;  // m x m Gram of the representers in H10
  Eigen::MatrixXd C;  // m x n cross matrix <w_i, q_j>_H10
  double mu_n = 0.0;
};

PbdwSystem build_pbdw(const FemSystem& sys, ReducedBasis rb, MeasurementSuite suite);

struct PbdwResult {
  Field u_star;
  Field v_star;
  Eigen::VectorXd eta;  // representer coefficients
  Eigen::VectorXd c;    // reduced-basis coefficients (Q coordinates)
};

// Saddle-point reconstruction from the measurement vector w:
// [[G, C], [C^T, 0]] [eta; c] = [w; 0].
PbdwResult pbdw_reconstruct(const PbdwSystem& p, const Eigen::VectorXd& w);

struct ParamEstimate {
  Eigen::VectorXd c_snapshot;      // v_star in snapshot coordinates (sorted order)
  std::vector<double> s;           // inverse diffusivities s_j = sum_i c_i / y^i_j
  std::vector<double> y_star;      // 1/s_j, or +inf when |s_j| <= 1e-12
  std::vector<bool> negative;      // per-component failure: s_j < -1e-12
  bool any_failed() const;
  ParamVector param() const;       // throws when any component failed
};

ParamEstimate estimate_params(const PbdwSystem& p, const Eigen::VectorXd& w);

}  // namespace hcrom

#endif
