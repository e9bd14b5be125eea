#include "pqlap/amann.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace pqlap {

namespace {

constexpr double kOrderSlack = 1e-10;

bool below(const ScalarField& a, const ScalarField& b, double slack) {
  for (int i : a.grid().interior_nodes())
    if (a.values[i] > b.values[i] + slack) return false;
  return true;
}

IterationReport rejected(Direction dir, const std::string& why) {
  IterationReport rep;
  rep.status = IterationStatus::InadmissibleLambda;
  rep.direction = dir;
  rep.message = why;
  return rep;
}

// Exponent set whose power reaction dominates lambda f(s)/s^beta.
std::pair<ExponentSet, double> dominating_power(const ProblemInstance& inst) {
  ExponentSet e = inst.exp;
  if (inst.nonlinearity.is_power_shifted()) return {e, 1.0};
  e.sigma = e.gamma_growth - e.beta;
  return {e, e.B};
}

}  // namespace

Reaction ProblemInstance::reaction() const {
  return [nl = nonlinearity, lambda = lambda](double s) { return g_eval(nl, lambda, s); };
}

ScalarField apply_T(const ScalarField& u, const ProblemInstance& inst, const SolverConfig& cfg,
                    const ScalarField* psi) {
  if (psi && !below(*psi, u, kOrderSlack)) throw std::domain_error("apply_T: u is not above psi");
  if (!(u.min_interior() > 0.0)) throw std::domain_error("apply_T: u must be positive at interior nodes");
  ScalarField w = solve_pq(inst.mesh, reaction_load(u, inst.reaction()), inst.exp, inst.coeff_q, cfg,
                           u.with_dirichlet());
  if (psi && !below(*psi, w, kOrderSlack)) throw std::runtime_error("apply_T: T(u) dropped below psi");
  return w;
}

IterationReport monotone_iterate(const ScalarField& start, Direction direction, const ProblemInstance& inst,
                                 const SolverConfig& cfg, const ScalarField* lower_barrier) {
  if (!(start.min_interior() > 0.0)) return rejected(direction, "start is not positive");
  const Eigen::VectorXd rhs = reaction_load(start, inst.reaction());
  if (direction == Direction::Ascending) {
    const ViolationReport v = verify_weak_subsolution(start, rhs, inst.exp, inst.coeff_q);
    if (!v.pass) {
      std::ostringstream os;
      os << "start is not a weak subsolution (defect " << v.max_violation << " > slack " << v.slack << " at node "
         << v.worst_node << ")";
      return rejected(direction, os.str());
    }
  } else {
    const ViolationReport v = verify_weak_supersolution(start, rhs, inst.exp, inst.coeff_q);
    if (!v.pass) {
      std::ostringstream os;
      os << "start is not a weak supersolution (defect " << v.max_violation << " > slack " << v.slack << ")";
      return rejected(direction, os.str());
    }
  }
  MonotoneOptions opts;
  opts.coeff_q = inst.coeff_q;
  opts.lower_barrier = lower_barrier;
  return iterate_monotone(start, direction, inst.reaction(), inst.exp, cfg, opts);
}

IterationReport solve_extremal(const ProblemInstance& inst, Extremal which, const SolverConfig& cfg,
                               ExtremalDiagnostics* diag, const Eigenpair* eig) {
  if (!(inst.lambda > 0.0)) throw std::invalid_argument("solve_extremal: lambda must be positive");
  ExtremalDiagnostics local_diag;
  ExtremalDiagnostics& d = diag ? *diag : local_diag;

  const auto [dom_exp, coeff] = dominating_power(inst);
  if (!(dom_exp.sigma < dom_exp.q - 1.0))
    throw std::invalid_argument("solve_extremal: global supersolution needs sigma < q - 1");
  IterationReport global;
  try {
    d.phi = solve_global_supersolution_descending(inst.mesh, dom_exp, coeff * inst.lambda, cfg, &global, inst.coeff_q);
  } catch (const std::runtime_error& e) {
    return rejected(which == Extremal::Minimal ? Direction::Ascending : Direction::Descending,
                    std::string("global supersolution failed: ") + e.what());
  }

  Eigenpair local_eig;
  if (!eig) {
    local_eig = principal_eigenpair(inst.mesh);
    eig = &local_eig;
  }
  d.r_exponent = pick_r_exponent(inst.exp);
  d.psi = build_subsolution_psi(*eig, inst.lambda, d.r_exponent, inst.exp.beta);
  d.psi_below_phi = below(*d.psi, *d.phi, 0.0);
  d.psi_check = verify_weak_subsolution(*d.psi, reaction_load(*d.psi, inst.reaction()), inst.exp, inst.coeff_q);
  d.psi_subsolution = d.psi_check.pass;

  if (which == Extremal::Maximal) return monotone_iterate(*d.phi, Direction::Descending, inst, cfg);

  if (!d.psi_below_phi) return rejected(Direction::Ascending, "psi exceeds Phi_lambda; lambda not large enough");
  if (!d.psi_subsolution) return rejected(Direction::Ascending, "psi is not a weak subsolution at this lambda");
  return monotone_iterate(*d.psi, Direction::Ascending, inst, cfg, &*d.psi);
}

ThresholdBracket existence_threshold(const InstanceFamily& family, double lambda_lo, double lambda_hi,
                                     double tol_lambda, const SolverConfig& cfg, int scan_points) {
  if (!(lambda_lo > 0.0 && lambda_hi > lambda_lo)) throw std::invalid_argument("threshold: need 0 < lo < hi");
  if (!(tol_lambda > 0.0)) throw std::invalid_argument("threshold: tol_lambda must be positive");
  scan_points = std::max(scan_points, 2);

  auto status_at = [&](double lambda) {
    return solve_extremal(family(lambda), Extremal::Maximal, cfg).status;
  };

  ThresholdBracket out;
  std::vector<double> grid(scan_points);
  for (int k = 0; k < scan_points; ++k)
    grid[k] = lambda_lo * std::pow(lambda_hi / lambda_lo, static_cast<double>(k) / (scan_points - 1));
  grid.back() = lambda_hi;

  std::vector<std::future<IterationStatus>> jobs;
  for (double l : grid) jobs.push_back(std::async(std::launch::async, status_at, l));
  for (std::size_t k = 0; k < grid.size(); ++k) out.samples.push_back({grid[k], jobs[k].get()});

  auto decided = [](IterationStatus s) {
    return s == IterationStatus::Converged || s == IterationStatus::NoPositiveSolution;
  };
  auto check_samples = [&]() -> bool {
    std::sort(out.samples.begin(), out.samples.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
    bool seen_exist = false;
    for (const auto& s : out.samples) {
      std::ostringstream os;
      if (!decided(s.status)) {
        os << "indeterminate status " << to_string(s.status) << " at lambda=" << s.lambda;
        out.message = os.str();
        return false;
      }
      const bool exists = s.status == IterationStatus::Converged;
      if (seen_exist && !exists) {
        os << "existence predicate not monotone: no solution at lambda=" << s.lambda << " above an existing one";
        out.message = os.str();
        return false;
      }
      seen_exist = seen_exist || exists;
    }
    return true;
  };
  if (!check_samples()) return out;

  if (out.samples.front().status != IterationStatus::NoPositiveSolution) {
    out.message = "a positive solution already exists at lambda_lo";
    return out;
  }
  if (out.samples.back().status != IterationStatus::Converged) {
    out.message = "no positive solution at lambda_hi";
    return out;
  }
  for (const auto& s : out.samples) {
    if (s.status == IterationStatus::Converged) {
      out.lambda_hi = s.lambda;
      break;
    }
    out.lambda_lo = s.lambda;
  }
  while (out.lambda_hi - out.lambda_lo > tol_lambda * out.lambda_hi) {
    const double mid = std::sqrt(out.lambda_lo * out.lambda_hi);
    const IterationStatus st = status_at(mid);
    out.samples.push_back({mid, st});
    if (!check_samples()) return out;
    (st == IterationStatus::Converged ? out.lambda_hi : out.lambda_lo) = mid;
  }
  out.ok = true;
  std::ostringstream os;
  os << "threshold in [" << out.lambda_lo << ", " << out.lambda_hi << "]";
  out.message = os.str();
  return out;
}

}  // namespace pqlap
