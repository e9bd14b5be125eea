#include "pqlap/subsuper.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>

namespace pqlap {

Eigenpair principal_eigenpair(MeshPtr mesh, double tol, int max_iter) {
  if (!mesh) throw std::invalid_argument("principal_eigenpair: null mesh");
  const SparseMatrix stiff = laplace_stiffness(*mesh);
  const Eigen::VectorXd mass = interior_lumped_mass(*mesh);
  Eigen::SimplicialLDLT<SparseMatrix> chol(stiff);
  if (chol.info() != Eigen::Success) throw std::runtime_error("principal_eigenpair: stiffness factorization failed");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(mesh->num_interior());
  double lambda = x.dot(stiff * x) / x.dot(mass.cwiseProduct(x));
  Eigenpair out;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd y = chol.solve(mass.cwiseProduct(x));
    y /= y.cwiseAbs().maxCoeff();
    const double next = y.dot(stiff * y) / y.dot(mass.cwiseProduct(y));
    x = std::move(y);
    const bool done = std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (done) {
      out.iterations = it;
      if (x.sum() < 0.0) x = -x;
      if (!(x.minCoeff() > 0.0)) throw std::runtime_error("principal_eigenpair: eigenvector is not positive");
      x /= x.maxCoeff();
      out.phi1 = ScalarField::from_interior(mesh, x);
      out.lambda1 = rayleigh_quotient(out.phi1);
      return out;
    }
  }
  throw MaxIterExceeded("principal_eigenpair: eigenvalue increment above tolerance", lambda);
}

double rayleigh_quotient(const ScalarField& u) {
  const Mesh& mesh = u.grid();
  double num = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    num += mesh.element_measure(e) * element_gradient(mesh, u.values, e).squaredNorm();
  double den = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) den += mesh.lumped_mass(i) * u.values[i] * u.values[i];
  return num / den;
}

double pick_r_exponent(const ExponentSet& exp) {
  if (!(exp.sigma > 0.0)) throw std::invalid_argument("pick_r_exponent: need sigma > 0 for a nonempty interval");
  const double lo_den = exp.p - 1.0 + exp.beta;
  const double hi_den = lo_den - exp.sigma;
  if (!(hi_den > 0.0)) throw std::invalid_argument("pick_r_exponent: need sigma < p - 1 + beta");
  return 0.5 * (1.0 / lo_den + 1.0 / hi_den);
}

ScalarField build_subsolution_psi(const Eigenpair& eig, double lambda, double r, double beta) {
  if (!(lambda > 0.0)) throw std::invalid_argument("psi: lambda must be positive");
  const double power = 2.0 / (1.0 + beta);
  const double scale = std::pow(lambda, r);
  ScalarField psi = eig.phi1;
  for (int i = 0; i < psi.size(); ++i) {
    const double phi = std::max(eig.phi1.values[i], 0.0);
    psi.values[i] = scale * (phi + std::pow(phi, power));
  }
  return psi;
}

double radial_torsion_profile(double p, int dim, double radius, double r) {
  const double pc = p / (p - 1.0);
  return std::pow(static_cast<double>(dim), -1.0 / (p - 1.0)) * (std::pow(radius, pc) - std::pow(r, pc)) / pc;
}

BallSupersolution build_supersolution_ball(const MeshPtr& mesh, const ExponentSet& exp, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("supersolution: lambda must be positive");
  const double expo = exp.p - 1.0 + exp.beta - exp.gamma_growth;
  if (!(expo > 0.0)) throw std::invalid_argument("supersolution: need gamma_growth < p - 1 + beta");

  BallSupersolution out;
  out.radius = 1.05 * mesh->circumradius();
  Eigen::VectorXd e(mesh->num_nodes());
  for (int i = 0; i < mesh->num_nodes(); ++i) {
    const double r = (mesh->node(i) - mesh->center()).norm();
    e[i] = radial_torsion_profile(exp.p, mesh->dim(), out.radius, r);
  }
  const double sup_e = radial_torsion_profile(exp.p, mesh->dim(), out.radius, 0.0);
  out.m = std::pow(lambda * exp.B * std::pow(sup_e, exp.gamma_growth - exp.beta), 1.0 / expo);
  out.profile = ScalarField(mesh, e);
  out.phi = ScalarField(mesh, out.m * e);
  return out;
}

BallSupersolution build_supersolution_ball(const MeshPtr& mesh, const ExponentSet& exp, double lambda,
                                           const ScalarField& psi) {
  BallSupersolution out = build_supersolution_ball(mesh, exp, lambda);
  auto ordered = [&] { return (out.m * out.profile.values - psi.values).minCoeff() >= 0.0; };
  while (!ordered()) {
    out.m *= 2.0;
    ++out.doublings;
    if (out.doublings > 200) throw std::runtime_error("supersolution: cannot dominate psi");
  }
  out.phi = ScalarField(mesh, out.m * out.profile.values);
  return out;
}

ScalarField build_subsolution_xi(const Eigenpair& eig, const ExponentSet& exp, double lambda, double epsilon,
                                 double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("xi: need 1 < alpha < 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("xi: need 0 < epsilon < 1");
  if (!(exp.sigma < exp.p - 1.0)) throw std::invalid_argument("xi: need sigma < p - 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("xi: lambda must be positive");
  const double scale = epsilon * std::pow(lambda, 1.0 / (exp.p - 1.0 - exp.sigma));
  ScalarField xi = eig.phi1;
  for (int i = 0; i < xi.size(); ++i) {
    const double phi = std::max(eig.phi1.values[i], 0.0);
    xi.values[i] = scale * (phi + std::pow(phi, alpha));
  }
  return xi;
}

namespace {

ViolationReport hatwise_defect(const ScalarField& u, const Eigen::VectorXd& rhs, const ExponentSet& exp,
                               double coeff_q, double sign) {
  const Mesh& mesh = u.grid();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_nodes());
  double rhs_sup = 0.0;
  for (int i : mesh.interior_nodes()) {
    load[i] = rhs[i];
    rhs_sup = std::max(rhs_sup, std::abs(rhs[i]));
  }
  const Eigen::VectorXd r = sign * weak_residual(u, load, exp, coeff_q);
  ViolationReport rep;
  Eigen::Index worst = 0;
  rep.max_violation = std::max(0.0, r.maxCoeff(&worst));
  rep.worst_node = mesh.interior_nodes()[static_cast<std::size_t>(worst)];
  rep.slack = 0.1 * mesh.max_element_diameter() * rhs_sup;
  rep.pass = rep.max_violation <= rep.slack;
  return rep;
}

}  // namespace

ViolationReport verify_weak_subsolution(const ScalarField& u, const Eigen::VectorXd& rhs, const ExponentSet& exp,
                                        double coeff_q) {
  return hatwise_defect(u, rhs, exp, coeff_q, 1.0);
}

ViolationReport verify_weak_supersolution(const ScalarField& u, const Eigen::VectorXd& rhs, const ExponentSet& exp,
                                          double coeff_q) {
  return hatwise_defect(u, rhs, exp, coeff_q, -1.0);
}

Reaction power_reaction(double lambda, double sigma) {
  return [lambda, sigma](double s) { return lambda * std::pow(std::max(s, 0.0), sigma); };
}

double choose_xi_epsilon(const Eigenpair& eig, const ExponentSet& exp, double lambda, double alpha,
                         int max_halvings) {
  const Reaction reaction = power_reaction(lambda, exp.sigma);
  double eps = 0.5;
  for (int k = 0; k <= max_halvings; ++k, eps *= 0.5) {
    const ScalarField xi = build_subsolution_xi(eig, exp, lambda, eps, alpha);
    // Require an exact discrete subsolution so the ascending iteration is
    // monotone from its first step.
    const ViolationReport v = verify_weak_subsolution(xi, reaction_load(xi, reaction), exp, 1.0);
    if (v.max_violation <= 0.0) return eps;
  }
  throw std::runtime_error("choose_xi_epsilon: no admissible epsilon found");
}

ScalarField solve_global_supersolution_descending(const MeshPtr& mesh, const ExponentSet& exp, double lambda,
                                                  const SolverConfig& cfg, IterationReport* report,
                                                  double coeff_q) {
  if (!(lambda > 0.0)) throw std::invalid_argument("global supersolution: lambda must be positive");
  // Constant load K dominating lambda z^sigma makes its solution a supersolution.
  double level = lambda;
  ScalarField start;
  for (int k = 0;; ++k) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh->num_nodes());
    for (int i : mesh->interior_nodes()) load[i] = level;
    start = solve_pq(mesh, load, exp, coeff_q, cfg);
    const double needed = lambda * std::pow(start.sup_norm(), exp.sigma);
    if (level >= needed) break;
    level = std::max(2.0 * level, 1.01 * needed);
    if (k > 200) throw std::runtime_error("global supersolution: no constant-load supersolution found");
  }
  MonotoneOptions opts;
  opts.coeff_q = coeff_q;
  IterationReport rep = iterate_monotone(start, Direction::Descending, power_reaction(lambda, exp.sigma), exp, cfg, opts);
  if (!rep.converged())
    throw std::runtime_error("global supersolution: descending iteration " + to_string(rep.status) + ": " +
                             rep.message);
  ScalarField out = *rep.final;
  if (report) *report = std::move(rep);
  return out;
}

GlobalSupersolution solve_global_supersolution(const MeshPtr& mesh, const ExponentSet& exp, double lambda,
                                               const SolverConfig& cfg, const Eigenpair* eig, double alpha) {
  exp.require_maximal_path();
  GlobalSupersolution out;
  out.phi = solve_global_supersolution_descending(mesh, exp, lambda, cfg, &out.descending);

  Eigenpair local;
  if (!eig) {
    local = principal_eigenpair(mesh);
    eig = &local;
  }
  out.epsilon = choose_xi_epsilon(*eig, exp, lambda, alpha);
  out.xi = build_subsolution_xi(*eig, exp, lambda, out.epsilon, alpha);
  out.ascending = iterate_monotone(out.xi, Direction::Ascending, power_reaction(lambda, exp.sigma), exp, cfg);
  if (!out.ascending.converged())
    throw std::runtime_error("global supersolution: ascending iteration " + to_string(out.ascending.status) + ": " +
                             out.ascending.message);
  out.limit_gap = (out.ascending.final->values - out.phi.values).cwiseAbs().maxCoeff() / out.phi.sup_norm();
  out.limits_agree = out.limit_gap <= 2.0 * cfg.tol_outer;
  return out;
}

}  // namespace pqlap
