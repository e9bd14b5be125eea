#pragma once

#include "pqlap/subsuper.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pqlap {

/// Radial profile u(r) on [0, R] with u'(r) stored for Hermite interpolation.
struct RadialProfile {
  std::vector<double> r_grid;
  std::vector<double> values;
  std::vector<double> slopes;
  int N_dim = 1;
  int shots = 0;

  double radius() const { return r_grid.back(); }
  double center_value() const { return values.front(); }
  /// Cubic Hermite interpolation; r is clamped to [0, R].
  double value_at(double r) const;
};

/// Inverse of s -> |s|^{p-2}s + c|s|^{q-2}s (odd, strictly increasing).
double invert_pq_flux(double y, double p, double q, double coeff_q);

/// Shooting on u(0) for
///   -(r^{N-1}(|u'|^{p-2}u' + c|u'|^{q-2}u'))' = r^{N-1} reaction(u),  u'(0)=0, u(R)=0,
/// integrating (u, flux) with adaptive Dormand-Prince (local error <= 1e-10)
/// and bisecting until |u(R)| <= tol. Throws std::runtime_error when no sign
/// change of u(R) is found or the integration blows up.
RadialProfile radial_shoot(const ExponentSet& exp, double coeff_q, const Reaction& reaction, double R, int N_dim,
                           double tol = 1e-10);

struct ComparisonReport {
  bool hypothesis_ok = false;  // f(s) s^{1-q} nonincreasing on the sample grid
  bool u1_subsolution = false;
  bool u2_supersolution = false;
  double max_excess = 0.0;     // max(u1 - u2) over interior nodes
  double slack = 0.0;          // 1e-8 ||u2||
  bool ordered = false;
  bool pass = false;           // hypotheses hold and u1 <= u2 + slack
};

/// Discrete comparison lemma for -Laplace_p u - c Laplace_q u = f(u).
ComparisonReport comparison_test(const ScalarField& u1, const ScalarField& u2, const Reaction& f,
                                 const ExponentSet& exp, double coeff_q = 1.0);

struct PointwiseReport {
  double max_violation = 0.0;
  int worst_element = -1;
  int elements_tested = 0;
};

/// Generalized Picone inequality at element barycenters:
///   |Da|^{p-2}Da . D(b^q/a^{q-1}) <= q/p |Db|^p + (p-q)/p |Da|^p,
/// with a, b the barycentric values and Da, Db the P1 gradients of u1, u2.
/// Violations are scaled by max(1, |Da|^p + |Db|^p).
PointwiseReport picone_pointwise_check(const ScalarField& u1, const ScalarField& u2, const ExponentSet& exp);

/// q-Laplacian cross term on elements where a > b:
///   |Da|^{q-2}Da.Dw1 - |Db|^{q-2}Db.Dw2 >= (2^{q-1}-1)^{-1} |a Db - b Da|^q / (a^q + b^q),
/// w1 = (a^q - b^q)/a^{q-1}, w2 = (a^q - b^q)/b^{q-1}. Violation is RHS - LHS,
/// scaled by max(1, |Da|^q + |Db|^q).
PointwiseReport lindqvist_term_check(const ScalarField& u1, const ScalarField& u2, double q);

struct ScalingReport {
  std::vector<double> lambdas;
  std::vector<double> sup_values;
  double slope_fit = 0.0;
  double expected = 0.0;
  std::vector<double> gamma_scales;
  std::vector<double> linf_rescaled;
  std::vector<double> ratio_min;  // min over interior nodes of Phi / (lambda^{1/(p-1-sigma)} d)
  std::vector<double> ratio_max;
  bool monotone_in_lambda = true;
  std::vector<ScalarField> fields;
  bool complete = false;
  std::string message;
};

/// Phi_lambda for each lambda (solves run in parallel), slope of
/// log sup Phi against log lambda fitted on the top half of the range.
ScalingReport scaling_sweep(const MeshPtr& mesh, const ExponentSet& exp, const std::vector<double>& lambdas,
                            const SolverConfig& cfg, double coeff_q = 1.0);

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// (min, max) of u/d over interior nodes with d <= band.
std::pair<double, double> boundary_ratio_profile(const ScalarField& u, double band);

}  // namespace pqlap
