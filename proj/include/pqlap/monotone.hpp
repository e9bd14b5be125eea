#pragma once

#include "pqlap/inner_solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pqlap {

enum class IterationStatus {
  Converged,
  NoPositiveSolution,
  MaxIterExceeded,
  MonotonicityViolated,
  InadmissibleLambda,
};

enum class Direction { Ascending, Descending };

std::string to_string(IterationStatus s);
std::string to_string(Direction d);

struct IterationStep {
  double sup_change = 0.0;    // ||u_{k+1} - u_k|| over interior nodes
  double min_interior = 0.0;  // of u_{k+1}
  double residual = 0.0;      // weak residual of u_{k+1} against its own reaction; NaN if not positive
};

struct IterationReport {
  IterationStatus status = IterationStatus::MaxIterExceeded;
  Direction direction = Direction::Descending;
  int n_outer = 0;
  std::optional<ScalarField> final;  // set when Converged
  std::vector<IterationStep> history;
  double final_residual = 0.0;
  double c_lower = 0.0;  // min over interior nodes of u/d for the final field
  std::string message;

  bool converged() const { return status == IterationStatus::Converged; }
};

/// Pointwise reaction u -> r(u); the frozen problem at each step is
/// -Laplace_p w - c Laplace_q w = r(u_k).
using Reaction = std::function<double(double)>;

struct MonotoneOptions {
  double coeff_q = 1.0;
  /// Ordering slack between consecutive iterates, relative to max(1, ||u||).
  double order_slack = 1e-10;
  /// Descending limits with min(u/d) below this are treated as not positive.
  double positivity_margin = 1e-8;
  /// Optional lower barrier (the subsolution) that ascending iterates must stay above.
  const ScalarField* lower_barrier = nullptr;
};

/// Picard iteration u_{k+1} = T(u_k) with T the solution operator of the
/// frozen problem. Stops when the relative sup change is at most tol_outer
/// and the weak residual of the iterate against its own reaction is at most
/// 10 tol_inner (or the assembly roundoff floor). Inner solver failures
/// propagate as MaxIterExceeded exceptions.
IterationReport iterate_monotone(const ScalarField& start, Direction direction, const Reaction& reaction,
                                 const ExponentSet& exp, const SolverConfig& cfg,
                                 const MonotoneOptions& opts = {});

/// Nodal reaction values r(u_i) at interior nodes, zero on the boundary.
Eigen::VectorXd reaction_load(const ScalarField& u, const Reaction& reaction);

/// min over interior nodes of u_i / d_i.
double lower_distance_constant(const ScalarField& u);

}  // namespace pqlap
