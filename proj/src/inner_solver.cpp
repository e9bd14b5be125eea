#include "pqlap/inner_solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <string>

namespace pqlap {

void SolverConfig::validate() const {
  if (!(tol_inner > 0.0 && tol_outer > 0.0)) throw std::invalid_argument("solver config: tolerances must be positive");
  if (max_inner_iters < 1 || max_outer_iters < 1)
    throw std::invalid_argument("solver config: iteration limits must be >= 1");
  if (!(eps_reg > 0.0 && eps_reg <= 1e-6)) throw std::invalid_argument("solver config: need 0 < eps_reg <= 1e-6");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("solver config: armijo_c must lie in (0,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw std::invalid_argument("solver config: backtrack_factor must lie in (0,1)");
}

SolverConfig SolverConfig::defaults_for(const Mesh& mesh) {
  SolverConfig cfg;
  cfg.tol_inner = mesh.dim() == 1 ? 1e-9 : 1e-8;
  return cfg;
}

namespace {

// Minimizer over t > 0 of t^p P/p + c t^q Q/q - t L for L > 0.
double optimal_scale(double P, double Q, double L, const ExponentSet& exp, double coeff_q) {
  auto slope = [&](double t) { return std::pow(t, exp.p - 1.0) * P + coeff_q * std::pow(t, exp.q - 1.0) * Q - L; };
  double hi = 1.0;
  while (slope(hi) < 0.0 && hi < 1e300) hi *= 2.0;
  double lo = 0.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Scaled solution of the linear Dirichlet problem; a cheap point from which
// Newton on the degenerate energy makes progress immediately.
Eigen::VectorXd initial_guess(const MeshPtr& mesh, const Eigen::VectorXd& load, const ExponentSet& exp,
                              double coeff_q) {
  const SparseMatrix stiff = laplace_stiffness(*mesh);
  Eigen::SimplicialLDLT<SparseMatrix> chol(stiff);
  Eigen::VectorXd rhs(mesh->num_interior());
  for (int i : mesh->interior_nodes()) rhs[mesh->dof(i)] = load[i] * mesh->lumped_mass(i);
  Eigen::VectorXd w0 = chol.solve(rhs);
  double L = rhs.dot(w0);
  if (L == 0.0 || !std::isfinite(L)) return Eigen::VectorXd::Zero(mesh->num_interior());
  if (L < 0.0) {
    w0 = -w0;
    L = -L;
  }
  const ScalarField f = ScalarField::from_interior(mesh, w0);
  double P = 0.0, Q = 0.0;
  for (int e = 0; e < mesh->num_elements(); ++e) {
    const double a = element_gradient(*mesh, f.values, e).norm();
    P += mesh->element_measure(e) * std::pow(a, exp.p);
    Q += mesh->element_measure(e) * std::pow(a, exp.q);
  }
  return optimal_scale(P, Q, L, exp, coeff_q) * w0;
}

}  // namespace

ScalarField solve_pq(MeshPtr mesh, const Eigen::VectorXd& load, const ExponentSet& exp,
                     double coeff_q, const SolverConfig& cfg,
                     const std::optional<ScalarField>& warm_start, InnerSolveStats* stats) {
  if (!mesh) throw std::invalid_argument("solve_pq: null mesh");
  if (!(exp.p > exp.q && exp.q > 1.0)) throw std::invalid_argument("solve_pq: need p > q > 1");
  if (!(coeff_q >= 0.0)) throw std::invalid_argument("solve_pq: coeff_q must be nonnegative");
  if (load.size() != mesh->num_nodes()) throw std::invalid_argument("solve_pq: load length mismatch");
  for (int i : mesh->interior_nodes())
    if (!std::isfinite(load[i])) throw std::domain_error("solve_pq: non-finite load at node " + std::to_string(i));

  InnerSolveStats local;
  InnerSolveStats& st = stats ? *stats : local;
  st = {};

  bool zero_load = true;
  for (int i : mesh->interior_nodes()) zero_load = zero_load && load[i] == 0.0;
  if (zero_load) return ScalarField::zero(mesh);

  Eigen::VectorXd x;
  if (warm_start) {
    if (warm_start->mesh.get() != mesh.get()) throw std::invalid_argument("solve_pq: warm start lives on another mesh");
    x = warm_start->interior_values();
  } else {
    x = initial_guess(mesh, load, exp, coeff_q);
  }

  auto field_of = [&](const Eigen::VectorXd& v) { return ScalarField::from_interior(mesh, v); };

  ScalarField w = field_of(x);
  double e_cur = energy(w, load, exp, coeff_q);
  Eigen::VectorXd r = weak_residual(w, load, exp, coeff_q);
  double last_rel_decrease = 0.0;

  Eigen::SimplicialLDLT<SparseMatrix> newton;
  std::optional<Eigen::SimplicialLDLT<SparseMatrix>> precond;

  for (int it = 0;; ++it) {
    const double res = r.cwiseAbs().maxCoeff();
    const double floor = residual_roundoff_floor(w, load, exp, coeff_q);
    st.iterations = it;
    st.residual = res;
    st.energy = e_cur;
    if (res <= std::max(cfg.tol_inner, floor) && last_rel_decrease <= cfg.tol_inner) return w;
    if (it >= cfg.max_inner_iters)
      throw MaxIterExceeded("solve_pq: residual " + std::to_string(res) + " after " + std::to_string(it) +
                                " Newton iterations",
                            res);

    const SparseMatrix hess = pq_hessian(w, exp, coeff_q, cfg.eps_reg);
    if (it == 0) newton.analyzePattern(hess);
    newton.factorize(hess);
    Eigen::VectorXd dir;
    bool use_gradient = newton.info() != Eigen::Success;
    if (!use_gradient) {
      dir = -newton.solve(r);
      use_gradient = !dir.allFinite() || !(r.dot(dir) < 0.0);
    }
    if (use_gradient) {
      if (!precond) precond.emplace(laplace_stiffness(*mesh));
      dir = -precond->solve(r);
      ++st.gradient_fallbacks;
    }

    const double slope = r.dot(dir);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 200; ++k, t *= cfg.backtrack_factor) {
      const Eigen::VectorXd x_try = x + t * dir;
      const ScalarField w_try = field_of(x_try);
      const double e_try = energy(w_try, load, exp, coeff_q);
      if (!std::isfinite(e_try)) continue;
      bool ok = e_try <= e_cur + cfg.armijo_c * t * slope;
      Eigen::VectorXd r_try;
      if (!ok && std::abs(e_try - e_cur) <= 1e-13 * (std::abs(e_cur) + 1.0)) {
        // Energy differences are at roundoff level; fall back to the residual.
        r_try = weak_residual(w_try, load, exp, coeff_q);
        ok = r_try.cwiseAbs().maxCoeff() < res;
      }
      if (ok) {
        if (r_try.size() == 0) r_try = weak_residual(w_try, load, exp, coeff_q);
        last_rel_decrease = std::max(0.0, e_cur - e_try) / std::max(1.0, std::abs(e_try));
        x = x_try;
        w = w_try;
        e_cur = e_try;
        r = std::move(r_try);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (res <= std::max(cfg.tol_inner, 1e3 * floor)) return w;
      throw MaxIterExceeded("solve_pq: line search failed with residual " + std::to_string(res), res);
    }
  }
}

double check_distance_bound(const ScalarField& w) {
  double c = 0.0;
  for (int i : w.grid().interior_nodes()) c = std::max(c, std::abs(w.values[i]) / w.grid().distance(i));
  return c;
}

}  // namespace pqlap
