#pragma once

#include "pqlap/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>

namespace pqlap {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal values of a continuous piecewise-linear function on a mesh.
struct ScalarField {
  MeshPtr mesh;
  Eigen::VectorXd values;

  ScalarField() = default;
  ScalarField(MeshPtr m, Eigen::VectorXd v);

  static ScalarField zero(MeshPtr m);

  const Mesh& grid() const { return *mesh; }
  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }

  /// Exactly zero at every boundary node.
  bool is_dirichlet() const;
  /// Copy with boundary values set to zero.
  ScalarField with_dirichlet() const;

  Eigen::VectorXd interior_values() const;
  static ScalarField from_interior(MeshPtr m, const Eigen::VectorXd& interior);

  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
  double min_interior() const;
};

/// Exponents and growth constants of the problem family.
///
/// Base invariants (checked by validate()): 1 < q < p, 0 < beta < 1,
/// sigma > 0, beta <= gamma_growth < beta + 1, A > 0, B > 0. Paths that
/// rely on the sub/supersolution constructions additionally need q > 2 and
/// either sigma < beta + 1 or sigma < q - 1; see the require_* helpers.
struct ExponentSet {
  double p = 4.0;
  double q = 3.0;
  double beta = 0.5;
  double sigma = 0.75;
  double gamma_growth = 0.5;
  double A = 1.0;
  double B = 1.0;

  void validate() const;
  void require_q_above_two() const;
  /// sigma < beta + 1 (hypothesis on the lower growth of f).
  void require_existence_path() const;
  /// sigma < q - 1 (sublinear regime of the global supersolution).
  void require_maximal_path() const;

  double conjugate_p() const { return p / (p - 1.0); }
};

/// Energy density |g|^p/p + c|g|^q/q and its derivatives in a = |g|.
struct PqDensity {
  double p;
  double q;
  double coeff_q;

  double value(double a) const;
  /// Scalar k(a) with flux = k(a) * g, i.e. a^{p-2} + c a^{q-2}.
  double flux_factor(double a) const;
  /// |flux| as a function of a: a^{p-1} + c a^{q-1}.
  double flux_magnitude(double a) const;
};

/// Sum over elements of |T| (|grad u|^p/p + c |grad u|^q/q) minus the lumped
/// load pairing sum_i load_i u_i m_i over interior nodes.
double energy(const ScalarField& u, const Eigen::VectorXd& load, const ExponentSet& exp,
              double coeff_q);

/// Gradient of energy() with respect to the interior nodal values, i.e. the
/// weak form tested against every interior hat function. Boundary values of
/// u enter the element gradients as given, so non-Dirichlet trial fields
/// (used by the supersolution checks) are accepted.
Eigen::VectorXd weak_residual(const ScalarField& u, const Eigen::VectorXd& load,
                              const ExponentSet& exp, double coeff_q);

/// Magnitude below which a residual entry is indistinguishable from
/// cancellation error in the assembled fluxes and loads.
double residual_roundoff_floor(const ScalarField& u, const Eigen::VectorXd& load,
                               const ExponentSet& exp, double coeff_q);

/// Regularized Hessian of energy() on interior nodes. The weights use
/// |g|^2 + eps_reg^2 in place of |g|^2; energy and gradient stay exact.
SparseMatrix pq_hessian(const ScalarField& u, const ExponentSet& exp, double coeff_q,
                        double eps_reg);

using LoadFunction = std::function<double(const Eigen::Ref<const Eigen::VectorXd>& x, double distance)>;

/// Nodal load h(x_i, d_i) at interior nodes, zero on the boundary.
Eigen::VectorXd assemble_load(const LoadFunction& h, const Mesh& mesh);

/// P1 stiffness of -Laplace with Dirichlet rows and columns removed.
SparseMatrix laplace_stiffness(const Mesh& mesh);

/// Lumped mass restricted to interior nodes.
Eigen::VectorXd interior_lumped_mass(const Mesh& mesh);

/// Constant gradient of the P1 field with nodal values `values` on element e.
Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1> element_gradient(const Mesh& mesh,
                                                                   const Eigen::VectorXd& values,
                                                                   int e);

}  // namespace pqlap
