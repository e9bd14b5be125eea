#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pqlap/verify.hpp"

#include <cmath>
#include <random>

using namespace pqlap;

namespace {

// -Lap_p u = 1 in the N-ball of radius R.
double torsion(double p, int N, double R, double r) {
  const double pp = p / (p - 1);
  return (p - 1) / p * std::pow(double(N), -1 / (p - 1)) * (std::pow(R, pp) - std::pow(r, pp));
}

ExponentSet sweep_exps() {
  ExponentSet e;
  e.sigma = 1.0;
  return e;
}

ScalarField random_positive(const MeshPtr& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.1, 2.0);
  ScalarField u = ScalarField::zero(m);
  for (int i : m->interior_nodes()) u.values[i] = d(rng);
  return u;
}

}  // namespace

TEST_CASE("invert_pq_flux") {
  for (double s : {-3.0, -0.2, 0.0, 1e-6, 0.7, 5.0}) {
    const double y = std::pow(std::abs(s), 3) * (s < 0 ? -1 : 1) + 0.5 * std::pow(std::abs(s), 1.5) * (s < 0 ? -1 : 1);
    CHECK(invert_pq_flux(y, 4, 2.5, 0.5) == doctest::Approx(s).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("radial shooting reproduces torsion closed forms") {
  ExponentSet e;
  e.q = 1.5;
  for (double p : {2.0, 3.0, 4.0})
    for (int N : {1, 2}) {
      e.p = p;
      const RadialProfile prof = radial_shoot(e, 0.0, [](double) { return 1.0; }, 0.8, N);
      for (double r : {0.0, 0.2, 0.5, 0.8})
        CHECK(std::abs(prof.value_at(r) - torsion(p, N, 0.8, r)) <= 1e-7 * torsion(p, N, 0.8, 0));
    }
}

TEST_CASE("radial shooting for p=2 with linear reaction") {
  // -u'' = 1 + u on (-R, R): u = cos(r)/cos(R) - 1.
  ExponentSet e;
  e.p = 2;
  e.q = 1.5;
  const RadialProfile prof = radial_shoot(e, 0.0, [](double s) { return 1.0 + s; }, 1.0, 1);
  for (double r : {0.0, 0.3, 0.9}) CHECK(prof.value_at(r) == doctest::Approx(std::cos(r) / std::cos(1.0) - 1).epsilon(1e-8));
}

TEST_CASE("disk FEM agrees with radial shooting") {
  auto m = build_disk_mesh(1.0, 0.04);
  const ExponentSet e = sweep_exps();
  const ScalarField phi = solve_global_supersolution_descending(m, e, 50.0, SolverConfig::defaults_for(*m));
  const RadialProfile prof = radial_shoot(e, 1.0, power_reaction(50.0, 1.0), 1.0, 2);
  double diff = 0;
  for (int i = 0; i < m->num_nodes(); ++i) diff = std::max(diff, std::abs(phi.values[i] - prof.value_at(m->node(i).norm())));
  CHECK(diff <= 0.02 * prof.center_value());
}

TEST_CASE("comparison test") {
  auto m = build_interval_mesh(0, 1, 128);
  const ExponentSet e = sweep_exps();
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  const Reaction f = power_reaction(10.0, 1.0);
  const GlobalSupersolution g = solve_global_supersolution(m, e, 10.0, cfg);

  SUBCASE("solution against itself") {
    const ComparisonReport r = comparison_test(g.phi, g.phi, f, e);
    CHECK(r.hypothesis_ok);
    CHECK(r.pass);
  }
  SUBCASE("xi below Phi") {
    const ComparisonReport r = comparison_test(g.xi, g.phi, f, e);
    CHECK(r.u1_subsolution);
    CHECK(r.u2_supersolution);
    CHECK(r.pass);
  }
  SUBCASE("half of a solution is a subsolution") {
    const ScalarField half(m, 0.5 * g.phi.values);
    CHECK(comparison_test(half, g.phi, f, e).pass);
    // Reversed roles: 0.5 Phi is not a supersolution.
    CHECK_FALSE(comparison_test(g.phi, half, f, e).pass);
  }
  SUBCASE("hypothesis fails for reactions growing faster than s^(q-1)") {
    CHECK_FALSE(comparison_test(g.phi, g.phi, power_reaction(10.0, 2.5), e).hypothesis_ok);
  }
}

TEST_CASE("Picone and Lindqvist checks") {
  auto m = build_unit_square_mesh(1.0 / 16);
  ExponentSet e;
  std::mt19937_64 rng(2024);
  SUBCASE("equal and proportional fields give equality") {
    const ScalarField u = random_positive(m, rng);
    CHECK(picone_pointwise_check(u, u, e).max_violation <= 1e-10);
    const ScalarField v(m, 3.0 * u.values);
    CHECK(picone_pointwise_check(u, v, e).max_violation <= 1e-10);
    CHECK(std::abs(lindqvist_term_check(v, u, 3.0).max_violation) <= 1e-10);
  }
  SUBCASE("random pairs") {
    for (double q : {2.5, 3.0}) {
      e.q = q;
      for (int t = 0; t < 100; ++t) {
        const ScalarField a = random_positive(m, rng), b = random_positive(m, rng);
        const PointwiseReport pr = picone_pointwise_check(a, b, e);
        CHECK(pr.elements_tested == m->num_elements());
        CHECK(pr.max_violation <= 1e-10);
        CHECK(lindqvist_term_check(a, b, q).max_violation <= 1e-10);
      }
    }
  }
  SUBCASE("rejects nonpositive values and q < 2") {
    CHECK_THROWS(picone_pointwise_check(ScalarField::zero(m), random_positive(m, rng), e));
    CHECK_THROWS(lindqvist_term_check(random_positive(m, rng), random_positive(m, rng), 1.5));
  }
}

TEST_CASE("scaling sweep") {
  auto m = build_interval_mesh(0, 1, 256);
  const ExponentSet e = sweep_exps();
  const std::vector<double> lambdas{10, 20, 40, 80, 160, 320, 640, 1280};
  const ScalingReport r = scaling_sweep(m, e, lambdas, SolverConfig::defaults_for(*m));
  REQUIRE(r.complete);
  CHECK(r.expected == doctest::Approx(0.5));
  CHECK(std::abs(r.slope_fit - r.expected) <= 0.1 * r.expected);
  CHECK(r.slope_fit > r.expected);  // approached from above on this range
  CHECK(r.monotone_in_lambda);
  CHECK(r.gamma_scales.size() == lambdas.size());
  CHECK(r.gamma_scales[0] == doctest::Approx(std::pow(10.0, -0.5)));
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    CHECK(r.ratio_min[k] > 0.0);
    CHECK(r.ratio_max[k] >= r.ratio_min[k]);
  }
  CHECK(least_squares_slope({1, 2, 3}, {2, 4, 6}) == doctest::Approx(2.0));
  CHECK_THROWS(scaling_sweep(m, e, {1, 2, 3}, SolverConfig::defaults_for(*m)));
}

TEST_CASE("boundary ratio profile") {
  auto m = build_interval_mesh(0, 1, 128);
  ScalarField tent = ScalarField::zero(m);
  for (int i = 0; i < m->num_nodes(); ++i) tent.values[i] = std::min(m->node(i)[0], 1 - m->node(i)[0]);
  const auto [lo, hi] = boundary_ratio_profile(tent, 0.1);
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(1.0));
  CHECK_THROWS(boundary_ratio_profile(tent, 0.6));
  CHECK_THROWS(boundary_ratio_profile(tent, 0.001));

  const ScalarField phi = solve_global_supersolution_descending(m, sweep_exps(), 10.0, SolverConfig::defaults_for(*m));
  for (double band : {0.2, 0.1, 0.05}) {
    const auto [a, b] = boundary_ratio_profile(phi, band);
    CHECK(a > 0.0);
    CHECK(b / a <= 10.0);
  }
}
