#pragma once

#include "pqlap/subsuper.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pqlap {

/// One member of the problem family  -Laplace_p u - c Laplace_q u = lambda f(u)/u^beta.
struct ProblemInstance {
  MeshPtr mesh;
  ExponentSet exp;
  Nonlinearity nonlinearity;
  double lambda = 1.0;
  double coeff_q = 1.0;

  /// s -> lambda f(s) / s^beta (throws for s <= 0).
  Reaction reaction() const;
};

/// T(u) = solution of the frozen problem with load g(u). When psi is given,
/// u must satisfy u >= psi and the result is checked against psi (slack 1e-10).
ScalarField apply_T(const ScalarField& u, const ProblemInstance& inst, const SolverConfig& cfg,
                    const ScalarField* psi = nullptr);

/// Monotone iteration of T. An ascending start must be a weak subsolution and
/// a descending start a weak supersolution of the instance; otherwise the
/// report carries InadmissibleLambda.
IterationReport monotone_iterate(const ScalarField& start, Direction direction, const ProblemInstance& inst,
                                 const SolverConfig& cfg, const ScalarField* lower_barrier = nullptr);

enum class Extremal { Minimal, Maximal };

/// Fields built on the way to an extremal solution.
struct ExtremalDiagnostics {
  std::optional<ScalarField> psi;
  std::optional<ScalarField> phi;     // global supersolution
  double r_exponent = 0.0;
  bool psi_below_phi = false;
  bool psi_subsolution = false;
  ViolationReport psi_check;
};

/// Minimal: ascending from psi, requires psi <= Phi_lambda and psi a weak
/// subsolution (InadmissibleLambda otherwise). Maximal: descending from
/// Phi_lambda; the psi ordering is recorded but not required.
IterationReport solve_extremal(const ProblemInstance& inst, Extremal which, const SolverConfig& cfg,
                               ExtremalDiagnostics* diag = nullptr, const Eigenpair* eig = nullptr);

using InstanceFamily = std::function<ProblemInstance(double lambda)>;

struct ThresholdSample {
  double lambda = 0.0;
  IterationStatus status = IterationStatus::MaxIterExceeded;
};

struct ThresholdBracket {
  bool ok = false;
  double lambda_lo = 0.0;  // largest sampled lambda without a positive solution
  double lambda_hi = 0.0;  // smallest sampled lambda with one
  std::vector<ThresholdSample> samples;  // sorted by lambda
  std::string message;

  double relative_width() const { return (lambda_hi - lambda_lo) / lambda_hi; }
};

/// Geometric bisection on "maximal solution exists". A coarse log scan of
/// scan_points values is evaluated in parallel first; the predicate must be
/// monotone on all samples. Indeterminate samples (neither Converged nor
/// NoPositiveSolution) abort the search.
ThresholdBracket existence_threshold(const InstanceFamily& family, double lambda_lo, double lambda_hi,
                                     double tol_lambda, const SolverConfig& cfg, int scan_points = 9);

}  // namespace pqlap
