#pragma once

#include "pqlap/monotone.hpp"
#include "pqlap/nonlinearity.hpp"

namespace pqlap {

/// Principal Dirichlet eigenpair of -Laplace, phi1 normalized to sup 1.
struct Eigenpair {
  double lambda1 = 0.0;
  ScalarField phi1;
  int iterations = 0;
};

/// Inverse power iteration on (stiffness, lumped mass); stops once the
/// relative eigenvalue increment is at most tol.
Eigenpair principal_eigenpair(MeshPtr mesh, double tol = 1e-12, int max_iter = 2000);

/// Rayleigh quotient of a Dirichlet field with the lumped mass.
double rayleigh_quotient(const ScalarField& u);

/// Midpoint of (1/(p-1+beta), 1/(p-1+beta-sigma)).
double pick_r_exponent(const ExponentSet& exp);

/// lambda^r (phi1 + phi1^{2/(1+beta)}).
ScalarField build_subsolution_psi(const Eigenpair& eig, double lambda, double r, double beta);

struct SubSuperPair {
  ScalarField psi;
  ScalarField phi_super;
  double c_lower = 0.0;
  bool ordering_ok = false;
};

/// Exact radial solution of -Laplace_p e = 1 on B_R in R^N:
/// N^{-1/(p-1)} (R^{p'} - r^{p'}) / p'.
double radial_torsion_profile(double p, int dim, double radius, double r);

struct BallSupersolution {
  ScalarField phi;        // m * e at the mesh nodes (positive on the boundary)
  ScalarField profile;    // e
  double m = 0.0;
  double radius = 0.0;
  int doublings = 0;
};

/// m(lambda) e with e the torsion profile of the ball of radius
/// 1.05 x circumradius about the domain centroid and
/// m = (lambda B (sup e)^{gamma-beta})^{1/(p-1+beta-gamma)}.
BallSupersolution build_supersolution_ball(const MeshPtr& mesh, const ExponentSet& exp, double lambda);

/// Same, with m doubled until psi <= m e at every node.
BallSupersolution build_supersolution_ball(const MeshPtr& mesh, const ExponentSet& exp, double lambda,
                                           const ScalarField& psi);

/// epsilon lambda^{1/(p-1-sigma)} (phi1 + phi1^alpha).
ScalarField build_subsolution_xi(const Eigenpair& eig, const ExponentSet& exp, double lambda, double epsilon,
                                 double alpha);

struct ViolationReport {
  double max_violation = 0.0;  // largest positive defect over interior hats
  double slack = 0.0;          // 0.1 * h * ||rhs||_inf
  int worst_node = -1;
  bool pass = false;
};

/// Tests  -Laplace_p u - c Laplace_q u <= rhs  against every interior hat.
/// rhs is pointwise per node (boundary entries ignored).
ViolationReport verify_weak_subsolution(const ScalarField& u, const Eigen::VectorXd& rhs, const ExponentSet& exp,
                                        double coeff_q);

/// Tests  -Laplace_p u - c Laplace_q u >= rhs  against every interior hat.
ViolationReport verify_weak_supersolution(const ScalarField& u, const Eigen::VectorXd& rhs, const ExponentSet& exp,
                                          double coeff_q);

/// Largest epsilon in {1/2, 1/4, ...} for which xi is a weak subsolution of
/// -Laplace_p z - Laplace_q z = lambda z^sigma.
double choose_xi_epsilon(const Eigenpair& eig, const ExponentSet& exp, double lambda, double alpha,
                         int max_halvings = 60);

struct GlobalSupersolution {
  ScalarField phi;          // descending limit
  ScalarField xi;           // ascending start
  double epsilon = 0.0;
  IterationReport ascending;
  IterationReport descending;
  double limit_gap = 0.0;   // sup |ascending - descending| / sup descending
  bool limits_agree = false;
};

/// Positive solution of -Laplace_p z - Laplace_q z = lambda z^sigma by monotone
/// iteration from xi (ascending) and from a constant-load supersolution
/// (descending). Throws std::runtime_error when either iteration fails.
GlobalSupersolution solve_global_supersolution(const MeshPtr& mesh, const ExponentSet& exp, double lambda,
                                               const SolverConfig& cfg, const Eigenpair* eig = nullptr,
                                               double alpha = 1.5);

/// Descending half only (cheaper; used by sweeps that do not need xi).
ScalarField solve_global_supersolution_descending(const MeshPtr& mesh, const ExponentSet& exp, double lambda,
                                                  const SolverConfig& cfg, IterationReport* report = nullptr,
                                                  double coeff_q = 1.0);

/// Reaction s -> lambda s^sigma (positive part).
Reaction power_reaction(double lambda, double sigma);

}  // namespace pqlap
