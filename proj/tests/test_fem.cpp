#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pqlap/fem.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace pqlap;

namespace {

ExponentSet exps(double p, double q) {
  ExponentSet e;
  e.p = p;
  e.q = q;
  return e;
}

ScalarField hat_peak_one() {
  auto m = build_interval_mesh(0.0, 1.0, 2);
  Eigen::VectorXd v(3);
  v << 0, 1, 0;
  return ScalarField(m, v);
}

ScalarField random_dirichlet(const MeshPtr& m, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ScalarField u = ScalarField::zero(m);
  for (int i : m->interior_nodes()) u.values[i] = d(rng);
  return u;
}

}  // namespace

TEST_CASE("energy of zero field is zero") {
  auto m = build_interval_mesh(0, 1, 8);
  Eigen::VectorXd load = Eigen::VectorXd::Constant(9, 3.0);
  CHECK(energy(ScalarField::zero(m), load, exps(4, 3), 1.0) == 0.0);
}

TEST_CASE("energy of the two-element hat") {
  const ScalarField u = hat_peak_one();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  // Slopes +-2 on elements of length 1/2.
  CHECK(energy(u, zero, exps(2.0 + 1e-13, 2.0), 1.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(energy(u, zero, exps(4, 3), 1.0) == doctest::Approx(20.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("hat residual central node, p=q=2") {
  const ScalarField u = hat_peak_one();
  const Eigen::VectorXd r = weak_residual(u, Eigen::VectorXd::Zero(3), exps(2.0 + 1e-13, 2.0), 1.0);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(8.0).epsilon(1e-10));
}

TEST_CASE("zero field, zero load has zero residual") {
  auto m = build_unit_square_mesh(0.25);
  const Eigen::VectorXd r = weak_residual(ScalarField::zero(m), Eigen::VectorXd::Zero(m->num_nodes()), exps(4, 3), 1.0);
  CHECK(r.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("residual of a discrete Poisson solution (p=q=2)") {
  // Hand-assembled tridiagonal system 2*(1/h)(2,-1) u = load*h, independent of the library assembly.
  const int n = 32;
  auto m = build_interval_mesh(0, 1, n);
  const double h = 1.0 / n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n - 1, n - 1);
  Eigen::VectorXd rhs(n - 1);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(n + 1);
  for (int k = 0; k < n - 1; ++k) {
    K(k, k) = 2 * 2 / h;
    if (k > 0) K(k, k - 1) = -2 / h;
    if (k + 1 < n - 1) K(k, k + 1) = -2 / h;
    const double x = (k + 1) * h;
    load[k + 1] = std::sin(3 * x) + 2;
    rhs[k] = load[k + 1] * h;
  }
  const Eigen::VectorXd sol = K.ldlt().solve(rhs);
  ScalarField u = ScalarField::zero(m);
  for (int k = 0; k < n - 1; ++k) u.values[k + 1] = sol[k];
  CHECK(weak_residual(u, load, exps(2.0 + 1e-13, 2.0), 1.0).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("energy rejects non-finite loads and non-Dirichlet fields") {
  auto m = build_interval_mesh(0, 1, 4);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(5);
  load[2] = NAN;
  CHECK_THROWS_AS(energy(ScalarField::zero(m), load, exps(4, 3), 1.0), std::domain_error);
  CHECK_THROWS_AS(weak_residual(ScalarField::zero(m), load, exps(4, 3), 1.0), std::domain_error);
  ScalarField u = ScalarField::zero(m);
  u.values[0] = 1.0;
  CHECK_THROWS(energy(u, Eigen::VectorXd::Zero(5), exps(4, 3), 1.0));
}

TEST_CASE("assemble_load") {
  auto m = build_interval_mesh(0, 1, 4);
  const Eigen::VectorXd one = assemble_load([](const auto&, double) { return 1.0; }, *m);
  CHECK(one[0] == 0.0);
  CHECK(one[4] == 0.0);
  for (int i = 1; i < 4; ++i) CHECK(one[i] == 1.0);
  const Eigen::VectorXd sing = assemble_load([](const auto&, double d) { return std::pow(d, -0.5); }, *m);
  CHECK(sing[1] == doctest::Approx(2.0));
  const Eigen::VectorXd strong = assemble_load([](const auto&, double d) { return std::pow(d, -2.0); }, *m);
  CHECK(std::isfinite(strong.maxCoeff()));
  CHECK_THROWS_AS(assemble_load([](const auto&, double) { return INFINITY; }, *m), std::domain_error);
}

TEST_CASE("laplace_stiffness 1D n=4") {
  auto m = build_interval_mesh(0, 1, 4);
  const Eigen::MatrixXd K(laplace_stiffness(*m));
  REQUIRE(K.rows() == 3);
  Eigen::Matrix3d expected;
  expected << 8, -4, 0, -4, 8, -4, 0, -4, 8;
  CHECK((K - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("laplace_stiffness is symmetric positive definite") {
  auto m = build_disk_mesh(1.0, 0.2);
  const Eigen::MatrixXd K(laplace_stiffness(*m));
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd v(K.rows());
    for (auto& x : v) x = g(rng);
    CHECK(v.dot(K * v) > 0.0);
  }
}

TEST_CASE("weak_residual matches central differences of energy with order ~2") {
  std::mt19937_64 rng(2024);
  auto m = build_unit_square_mesh(0.25);
  const ExponentSet e = exps(4, 3);
  for (int t = 0; t < 5; ++t) {
    const ScalarField u = random_dirichlet(m, rng);
    const ScalarField v = random_dirichlet(m, rng);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(m->num_nodes());
    for (int i : m->interior_nodes()) load[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double exact = weak_residual(u, load, e, 1.0).dot(v.interior_values());
    auto err = [&](double eps) {
      const ScalarField up(m, u.values + eps * v.values), um(m, u.values - eps * v.values);
      return std::abs((energy(up, load, e, 1.0) - energy(um, load, e, 1.0)) / (2 * eps) - exact);
    };
    const double order = std::log2(err(1e-2) / err(5e-3));
    CHECK(order >= 1.9);
  }
}

TEST_CASE("energy is convex along segments") {
  std::mt19937_64 rng(99);
  auto m = build_interval_mesh(0, 1, 20);
  const ExponentSet e = exps(4, 3);
  Eigen::VectorXd load = Eigen::VectorXd::Constant(m->num_nodes(), 1.5);
  for (int t = 0; t < 50; ++t) {
    const ScalarField u1 = random_dirichlet(m, rng), u2 = random_dirichlet(m, rng);
    const double s = std::uniform_real_distribution<double>(0, 1)(rng);
    const ScalarField mix(m, s * u1.values + (1 - s) * u2.values);
    CHECK(energy(mix, load, e, 1.0) <= s * energy(u1, load, e, 1.0) + (1 - s) * energy(u2, load, e, 1.0) + 1e-12);
  }
}

TEST_CASE("energy scaling with zero load") {
  std::mt19937_64 rng(5);
  auto m = build_unit_square_mesh(0.2);
  const ScalarField u = random_dirichlet(m, rng);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m->num_nodes());
  // Separate the p- and q-terms with coefficient 0 and difference.
  const double P = energy(u, zero, exps(4, 3), 0.0);
  const double Q = energy(u, zero, exps(4, 3), 1.0) - P;
  for (double c : {0.3, 2.0, 7.5}) {
    const ScalarField cu(m, c * u.values);
    CHECK(energy(cu, zero, exps(4, 3), 1.0) ==
          doctest::Approx(std::pow(c, 4) * P + std::pow(c, 3) * Q).epsilon(1e-12));
  }
}

TEST_CASE("pq_hessian matches the residual derivative away from zero gradient") {
  std::mt19937_64 rng(11);
  auto m = build_interval_mesh(0, 1, 10);
  const ExponentSet e = exps(4, 3);
  const ScalarField u = random_dirichlet(m, rng, 0.5, 3.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m->num_nodes());
  const Eigen::MatrixXd H(pq_hessian(u, e, 1.0, 1e-12));
  const ScalarField v = random_dirichlet(m, rng);
  const double eps = 1e-6;
  const Eigen::VectorXd fd = (weak_residual(ScalarField(m, u.values + eps * v.values), zero, e, 1.0) -
                              weak_residual(ScalarField(m, u.values - eps * v.values), zero, e, 1.0)) /
                             (2 * eps);
  CHECK((fd - H * v.interior_values()).cwiseAbs().maxCoeff() <= 1e-5 * (1 + fd.cwiseAbs().maxCoeff()));
}

TEST_CASE("ExponentSet validation") {
  ExponentSet e;
  CHECK_NOTHROW(e.validate());
  e.q = 4.5;
  CHECK_THROWS_WITH_AS(e.validate(), doctest::Contains("1 < q < p"), std::invalid_argument);
  e = ExponentSet{};
  e.beta = 1.0;
  CHECK_THROWS(e.validate());
  e = ExponentSet{};
  e.gamma_growth = 1.6;
  CHECK_THROWS(e.validate());
  e = ExponentSet{};
  e.q = 1.8;
  CHECK_THROWS(e.require_q_above_two());
  e = ExponentSet{};
  e.sigma = 2.5;
  CHECK_THROWS(e.require_maximal_path());
  CHECK_THROWS(e.require_existence_path());
}

TEST_CASE("ScalarField helpers") {
  auto m = build_interval_mesh(0, 1, 4);
  Eigen::VectorXd v(5);
  v << 1, 2, -3, 4, 5;
  const ScalarField u(m, v);
  CHECK_FALSE(u.is_dirichlet());
  const ScalarField w = u.with_dirichlet();
  CHECK(w.is_dirichlet());
  CHECK(w.min_interior() == -3);
  CHECK(u.sup_norm() == 5);
  CHECK(ScalarField::from_interior(m, w.interior_values()).values == w.values);
  CHECK_THROWS(ScalarField(m, Eigen::VectorXd::Zero(3)));
}
