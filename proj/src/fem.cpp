#include "pqlap/fem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqlap {

ScalarField::ScalarField(MeshPtr m, Eigen::VectorXd v) : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw std::invalid_argument("ScalarField: null mesh");
  if (values.size() != mesh->num_nodes())
    throw std::invalid_argument("ScalarField: value count does not match node count");
}

ScalarField ScalarField::zero(MeshPtr m) {
  const int n = m->num_nodes();
  return ScalarField(std::move(m), Eigen::VectorXd::Zero(n));
}

bool ScalarField::is_dirichlet() const {
  for (int i = 0; i < mesh->num_nodes(); ++i)
    if (mesh->is_boundary(i) && values[i] != 0.0) return false;
  return true;
}

ScalarField ScalarField::with_dirichlet() const {
  ScalarField out = *this;
  for (int i = 0; i < mesh->num_nodes(); ++i)
    if (mesh->is_boundary(i)) out.values[i] = 0.0;
  return out;
}

Eigen::VectorXd ScalarField::interior_values() const {
  const auto& interior = mesh->interior_nodes();
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) out[static_cast<Eigen::Index>(k)] = values[interior[k]];
  return out;
}

ScalarField ScalarField::from_interior(MeshPtr m, const Eigen::VectorXd& interior) {
  if (interior.size() != m->num_interior())
    throw std::invalid_argument("ScalarField::from_interior: wrong interior vector length");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m->num_nodes());
  const auto& ids = m->interior_nodes();
  for (std::size_t k = 0; k < ids.size(); ++k) v[ids[k]] = interior[static_cast<Eigen::Index>(k)];
  return ScalarField(std::move(m), std::move(v));
}

double ScalarField::min_interior() const {
  double out = std::numeric_limits<double>::infinity();
  for (int i : mesh->interior_nodes()) out = std::min(out, values[i]);
  return out;
}

void ExponentSet::validate() const {
  if (!(q > 1.0 && q < p)) throw std::invalid_argument("exponents: need 1 < q < p");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("exponents: need 0 < beta < 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("exponents: need sigma > 0");
  if (!(gamma_growth >= beta && gamma_growth < beta + 1.0))
    throw std::invalid_argument("exponents: need beta <= gamma_growth < beta + 1");
  if (!(A > 0.0 && B > 0.0)) throw std::invalid_argument("exponents: need A > 0 and B > 0");
}

void ExponentSet::require_q_above_two() const {
  if (!(q > 2.0)) throw std::invalid_argument("exponents: this construction needs 2 < q < p");
}

void ExponentSet::require_existence_path() const {
  require_q_above_two();
  if (!(sigma < beta + 1.0)) throw std::invalid_argument("exponents: need sigma < beta + 1");
}

void ExponentSet::require_maximal_path() const {
  require_q_above_two();
  if (!(sigma < q - 1.0)) throw std::invalid_argument("exponents: need sigma < q - 1");
}

double PqDensity::value(double a) const {
  return std::pow(a, p) / p + coeff_q * std::pow(a, q) / q;
}

double PqDensity::flux_factor(double a) const {
  if (a == 0.0) return 0.0;
  return std::pow(a, p - 2.0) + coeff_q * std::pow(a, q - 2.0);
}

double PqDensity::flux_magnitude(double a) const {
  return std::pow(a, p - 1.0) + coeff_q * std::pow(a, q - 1.0);
}

Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1> element_gradient(const Mesh& mesh,
                                                                   const Eigen::VectorXd& values,
                                                                   int e) {
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1> g = Eigen::VectorXd::Zero(mesh.dim());
  for (int k = 0; k < mesh.nodes_per_element(); ++k)
    g += values[mesh.element_node(e, k)] * mesh.basis_gradient(e, k);
  return g;
}

namespace {

void check_load(const Mesh& mesh, const Eigen::VectorXd& load) {
  if (load.size() != mesh.num_nodes()) throw std::invalid_argument("load: length does not match node count");
  for (int i : mesh.interior_nodes())
    if (!std::isfinite(load[i]))
      throw std::domain_error("load: non-finite value at interior node " + std::to_string(i));
}

}  // namespace

double energy(const ScalarField& u, const Eigen::VectorXd& load, const ExponentSet& exp,
              double coeff_q) {
  const Mesh& mesh = u.grid();
  if (!u.is_dirichlet()) throw std::invalid_argument("energy: field must vanish on the boundary");
  check_load(mesh, load);
  const PqDensity density{exp.p, exp.q, coeff_q};
  double gradient_part = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    gradient_part += mesh.element_measure(e) * density.value(element_gradient(mesh, u.values, e).norm());
  double load_part = 0.0;
  for (int i : mesh.interior_nodes()) load_part += load[i] * u.values[i] * mesh.lumped_mass(i);
  return gradient_part - load_part;
}

Eigen::VectorXd weak_residual(const ScalarField& u, const Eigen::VectorXd& load,
                              const ExponentSet& exp, double coeff_q) {
  const Mesh& mesh = u.grid();
  check_load(mesh, load);
  const PqDensity density{exp.p, exp.q, coeff_q};
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.num_interior());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto g = element_gradient(mesh, u.values, e);
    const double k = density.flux_factor(g.norm());
    if (k == 0.0) continue;
    const double scale = mesh.element_measure(e) * k;
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      const int dof = mesh.dof(mesh.element_node(e, a));
      if (dof >= 0) r[dof] += scale * g.dot(mesh.basis_gradient(e, a));
    }
  }
  for (int i : mesh.interior_nodes()) r[mesh.dof(i)] -= load[i] * mesh.lumped_mass(i);
  return r;
}

double residual_roundoff_floor(const ScalarField& u, const Eigen::VectorXd& load,
                               const ExponentSet& exp, double coeff_q) {
  const Mesh& mesh = u.grid();
  const PqDensity density{exp.p, exp.q, coeff_q};
  Eigen::VectorXd mag = Eigen::VectorXd::Zero(mesh.num_interior());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double a_norm = element_gradient(mesh, u.values, e).norm();
    const double flux = density.flux_magnitude(a_norm);
    // Sensitivity of the flux to one ulp in each nodal value.
    const double tangent = (exp.p - 1.0) * std::pow(a_norm, exp.p - 2.0) +
                           coeff_q * (exp.q - 1.0) * std::pow(a_norm, exp.q - 2.0);
    double spread = 0.0;
    for (int b = 0; b < mesh.nodes_per_element(); ++b)
      spread += mesh.basis_gradient(e, b).norm() * std::abs(u.values[mesh.element_node(e, b)]);
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      const int dof = mesh.dof(mesh.element_node(e, a));
      if (dof >= 0)
        mag[dof] += mesh.element_measure(e) * (flux + tangent * spread) * mesh.basis_gradient(e, a).norm();
    }
  }
  for (int i : mesh.interior_nodes()) mag[mesh.dof(i)] += std::abs(load[i]) * mesh.lumped_mass(i);
  return 8.0 * std::numeric_limits<double>::epsilon() * mag.maxCoeff();
}

SparseMatrix pq_hessian(const ScalarField& u, const ExponentSet& exp, double coeff_q,
                        double eps_reg) {
  const Mesh& mesh = u.grid();
  const int npe = mesh.nodes_per_element();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_elements()) * npe * npe);
  const double eps2 = eps_reg * eps_reg;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto g = element_gradient(mesh, u.values, e);
    const double s2 = g.squaredNorm() + eps2;
    // d^2 W / dg^2 = k I + m g g^T with both weights evaluated at |g|^2 + eps^2.
    const double k = std::pow(s2, 0.5 * (exp.p - 2.0)) + coeff_q * std::pow(s2, 0.5 * (exp.q - 2.0));
    const double m = (exp.p - 2.0) * std::pow(s2, 0.5 * (exp.p - 4.0)) +
                     coeff_q * (exp.q - 2.0) * std::pow(s2, 0.5 * (exp.q - 4.0));
    const double vol = mesh.element_measure(e);
    for (int a = 0; a < npe; ++a) {
      const int da = mesh.dof(mesh.element_node(e, a));
      if (da < 0) continue;
      const auto ga = mesh.basis_gradient(e, a);
      const double ga_g = ga.dot(g);
      for (int b = 0; b < npe; ++b) {
        const int db = mesh.dof(mesh.element_node(e, b));
        if (db < 0) continue;
        const auto gb = mesh.basis_gradient(e, b);
        trips.emplace_back(da, db, vol * (k * ga.dot(gb) + m * ga_g * g.dot(gb)));
      }
    }
  }
  SparseMatrix h(mesh.num_interior(), mesh.num_interior());
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

Eigen::VectorXd assemble_load(const LoadFunction& h, const Mesh& mesh) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i : mesh.interior_nodes()) {
    const double v = h(mesh.node(i), mesh.distance(i));
    if (!std::isfinite(v))
      throw std::domain_error("assemble_load: non-finite load at interior node " + std::to_string(i));
    load[i] = v;
  }
  return load;
}

SparseMatrix laplace_stiffness(const Mesh& mesh) {
  const int npe = mesh.nodes_per_element();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_elements()) * npe * npe);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double vol = mesh.element_measure(e);
    for (int a = 0; a < npe; ++a) {
      const int da = mesh.dof(mesh.element_node(e, a));
      if (da < 0) continue;
      for (int b = 0; b < npe; ++b) {
        const int db = mesh.dof(mesh.element_node(e, b));
        if (db < 0) continue;
        trips.emplace_back(da, db, vol * mesh.basis_gradient(e, a).dot(mesh.basis_gradient(e, b)));
      }
    }
  }
  SparseMatrix k(mesh.num_interior(), mesh.num_interior());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

Eigen::VectorXd interior_lumped_mass(const Mesh& mesh) {
  Eigen::VectorXd m(mesh.num_interior());
  for (int i : mesh.interior_nodes()) m[mesh.dof(i)] = mesh.lumped_mass(i);
  return m;
}

}  // namespace pqlap
