#include "pqlap/monotone.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pqlap {

std::string to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::Converged: return "Converged";
    case IterationStatus::NoPositiveSolution: return "NoPositiveSolution";
    case IterationStatus::MaxIterExceeded: return "MaxIterExceeded";
    case IterationStatus::MonotonicityViolated: return "MonotonicityViolated";
    case IterationStatus::InadmissibleLambda: return "InadmissibleLambda";
  }
  return "Unknown";
}

std::string to_string(Direction d) { return d == Direction::Ascending ? "ascending" : "descending"; }

Eigen::VectorXd reaction_load(const ScalarField& u, const Reaction& reaction) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(u.size());
  for (int i : u.grid().interior_nodes()) load[i] = reaction(u.values[i]);
  return load;
}

double lower_distance_constant(const ScalarField& u) {
  double c = std::numeric_limits<double>::infinity();
  for (int i : u.grid().interior_nodes()) c = std::min(c, u.values[i] / u.grid().distance(i));
  return c;
}

IterationReport iterate_monotone(const ScalarField& start, Direction direction, const Reaction& reaction,
                                 const ExponentSet& exp, const SolverConfig& cfg, const MonotoneOptions& opts) {
  IterationReport rep;
  rep.direction = direction;
  const Mesh& mesh = start.grid();
  const bool ascending = direction == Direction::Ascending;

  ScalarField u = start;
  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    if (!(u.min_interior() > 0.0)) {
      rep.status = IterationStatus::NoPositiveSolution;
      rep.n_outer = k - 1;
      std::ostringstream os;
      os << "iterate " << k - 1 << " has min interior value " << u.min_interior();
      rep.message = os.str();
      return rep;
    }
    const Eigen::VectorXd load = reaction_load(u, reaction);
    const ScalarField w = solve_pq(start.mesh, load, exp, opts.coeff_q, cfg, u.with_dirichlet());

    const double scale = std::max(1.0, u.sup_norm());
    double change = 0.0;
    double worst_order = 0.0;
    for (int i : mesh.interior_nodes()) {
      const double diff = w.values[i] - u.values[i];
      change = std::max(change, std::abs(diff));
      worst_order = std::max(worst_order, ascending ? -diff : diff);
    }
    IterationStep step;
    step.sup_change = change;
    step.min_interior = w.min_interior();
    step.residual = std::numeric_limits<double>::quiet_NaN();
    double floor = 0.0;
    if (step.min_interior > 0.0) {
      const Eigen::VectorXd own = reaction_load(w, reaction);
      step.residual = weak_residual(w, own, exp, opts.coeff_q).cwiseAbs().maxCoeff();
      floor = residual_roundoff_floor(w, own, exp, opts.coeff_q);
    }
    rep.history.push_back(step);
    rep.n_outer = k;

    if (worst_order > opts.order_slack * scale) {
      rep.status = IterationStatus::MonotonicityViolated;
      std::ostringstream os;
      os << to_string(direction) << " ordering broken by " << worst_order << " at outer iteration " << k;
      rep.message = os.str();
      return rep;
    }
    if (opts.lower_barrier) {
      for (int i : mesh.interior_nodes()) {
        if (w.values[i] < opts.lower_barrier->values[i] - opts.order_slack * scale) {
          rep.status = IterationStatus::MonotonicityViolated;
          rep.message = "iterate dropped below the subsolution";
          return rep;
        }
      }
    }

    const bool small_change = change <= cfg.tol_outer * std::max(w.sup_norm(), std::numeric_limits<double>::min());
    const bool small_residual = step.min_interior > 0.0 && step.residual <= std::max(10.0 * cfg.tol_inner, floor);
    if (small_change && small_residual) {
      rep.final_residual = step.residual;
      rep.c_lower = lower_distance_constant(w);
      if (!ascending && !(rep.c_lower >= opts.positivity_margin)) {
        rep.status = IterationStatus::NoPositiveSolution;
        rep.message = "descending limit fails the positivity margin min(u/d) >= " +
                      std::to_string(opts.positivity_margin);
        return rep;
      }
      rep.status = IterationStatus::Converged;
      rep.final = w;
      return rep;
    }
    u = w;
  }
  if (!(u.min_interior() > 0.0)) {
    rep.status = IterationStatus::NoPositiveSolution;
    rep.message = "last iterate is not positive";
    return rep;
  }
  rep.status = IterationStatus::MaxIterExceeded;
  rep.message = "outer iteration limit reached";
  if (u.min_interior() > 0.0) rep.c_lower = lower_distance_constant(u);
  return rep;
}

}  // namespace pqlap
