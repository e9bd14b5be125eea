#pragma once

#include "pqlap/fem.hpp"

#include <optional>
#include <stdexcept>

namespace pqlap {

struct SolverConfig {
  double tol_inner = 1e-9;      // sup norm of the weak residual
  double tol_outer = 1e-6;      // relative sup change between outer iterates
  int max_inner_iters = 500;
  int max_outer_iters = 300;
  double eps_reg = 1e-7;        // curvature regularization only
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;

  void validate() const;

  /// Defaults for 1D (tol_inner 1e-9) or 2D (tol_inner 1e-8) meshes.
  static SolverConfig defaults_for(const Mesh& mesh);
};

class MaxIterExceeded : public std::runtime_error {
public:
  MaxIterExceeded(const std::string& what, double final_residual)
      : std::runtime_error(what), final_residual_(final_residual) {}
  double final_residual() const { return final_residual_; }

private:
  double final_residual_;
};

struct InnerSolveStats {
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  int gradient_fallbacks = 0;
};

/// Minimizer of the convex energy of -Laplace_p w - c Laplace_q w = load with
/// zero Dirichlet data, by damped Newton with Armijo backtracking. Throws
/// MaxIterExceeded when the residual tolerance is not reached.
ScalarField solve_pq(MeshPtr mesh, const Eigen::VectorXd& load, const ExponentSet& exp,
                     double coeff_q, const SolverConfig& cfg,
                     const std::optional<ScalarField>& warm_start = std::nullopt,
                     InnerSolveStats* stats = nullptr);

/// max over interior nodes of |w_i| / d_i.
double check_distance_bound(const ScalarField& w);

}  // namespace pqlap
