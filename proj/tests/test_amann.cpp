#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pqlap/amann.hpp"

#include <cmath>
#include <random>

using namespace pqlap;

namespace {

ExponentSet standard() {
  ExponentSet e;
  e.gamma_growth = 1.25;
  return e;
}

ProblemInstance instance(const MeshPtr& m, double lambda) {
  const ExponentSet e = standard();
  return ProblemInstance{m, e, Nonlinearity(PowerShifted{0.75}, e), lambda, 1.0};
}

MeshPtr mesh256() {
  static const MeshPtr m = build_interval_mesh(0, 1, 256);
  return m;
}

}  // namespace

TEST_CASE("apply_T at a discrete fixed point") {
  auto m = mesh256();
  const ProblemInstance inst = instance(m, 1000.0);
  SolverConfig cfg = SolverConfig::defaults_for(*m);
  cfg.tol_outer = 1e-12;
  cfg.max_outer_iters = 3000;
  const IterationReport rep = solve_extremal(inst, Extremal::Maximal, cfg);
  REQUIRE(rep.converged());
  const ScalarField tu = apply_T(*rep.final, inst, cfg);
  CHECK((tu.values - rep.final->values).cwiseAbs().maxCoeff() <= 2 * cfg.tol_inner);

  SUBCASE("restarting from a solution converges in one outer step") {
    const IterationReport again = monotone_iterate(*rep.final, Direction::Descending, inst, SolverConfig::defaults_for(*m));
    CHECK(again.converged());
    CHECK(again.n_outer == 1);
  }
}

TEST_CASE("T is monotone on random ordered pairs") {
  auto m = build_interval_mesh(0, 1, 64);
  const ProblemInstance inst = instance(m, 500.0);
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> a(0.05, 3.0), b(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    ScalarField u1 = ScalarField::zero(m), u2 = ScalarField::zero(m);
    for (int i : m->interior_nodes()) {
      u1.values[i] = a(rng);
      u2.values[i] = u1.values[i] + b(rng);
    }
    CHECK((apply_T(u1, inst, cfg).values - apply_T(u2, inst, cfg).values).maxCoeff() <= 1e-10);
  }
}

TEST_CASE("apply_T lower bound handling") {
  auto m = build_interval_mesh(0, 1, 128);
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  const Eigenpair eig = principal_eigenpair(m);
  const ExponentSet e = standard();
  SUBCASE("T(psi) >= psi where psi is a subsolution") {
    const ProblemInstance inst = instance(m, 1e11);
    const ScalarField psi = build_subsolution_psi(eig, inst.lambda, pick_r_exponent(e), e.beta);
    const ScalarField t = apply_T(psi, inst, cfg, &psi);
    CHECK((psi.values - t.values).maxCoeff() <= 1e-10);
  }
  SUBCASE("at lambda=100 psi is not a subsolution and T(psi) drops below it") {
    const ProblemInstance inst = instance(m, 100.0);
    const ScalarField psi = build_subsolution_psi(eig, inst.lambda, pick_r_exponent(e), e.beta);
    CHECK_THROWS_AS(apply_T(psi, inst, cfg, &psi), std::runtime_error);
  }
  SUBCASE("inputs below psi are rejected") {
    const ProblemInstance inst = instance(m, 1e11);
    const ScalarField psi = build_subsolution_psi(eig, inst.lambda, pick_r_exponent(e), e.beta);
    const ScalarField low(m, 0.5 * psi.values);
    CHECK_THROWS_AS(apply_T(low, inst, cfg, &psi), std::domain_error);
  }
}

TEST_CASE("maximal solution where one exists") {
  auto m = mesh256();
  const ProblemInstance inst = instance(m, 1000.0);
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  ExtremalDiagnostics d;
  const IterationReport rep = solve_extremal(inst, Extremal::Maximal, cfg, &d);
  REQUIRE(rep.converged());
  CHECK(rep.final_residual <= 1e-7);
  CHECK(rep.c_lower > 0.0);
  CHECK(rep.final->min_interior() > 0.0);
  CHECK((rep.final->values - d.phi->values).maxCoeff() <= 1e-10);
  // Descending history is nonincreasing: every step change was ordered.
  for (const auto& s : rep.history) CHECK(s.min_interior > 0.0);
  // Fixed-point residual relative to the outer tolerance.
  const ScalarField t = apply_T(*rep.final, inst, cfg);
  CHECK((t.values - rep.final->values).cwiseAbs().maxCoeff() <= 2 * cfg.tol_outer * rep.final->sup_norm());
  // Minimal path is inadmissible here: psi exceeds Phi.
  const IterationReport low = solve_extremal(inst, Extremal::Minimal, cfg);
  CHECK(low.status == IterationStatus::InadmissibleLambda);
}

TEST_CASE("no positive solution at small lambda") {
  auto m = mesh256();
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  for (double lambda : {0.01, 100.0}) {
    const IterationReport rep = solve_extremal(instance(m, lambda), Extremal::Maximal, cfg);
    CHECK(rep.status == IterationStatus::NoPositiveSolution);
    CHECK(rep.n_outer <= 50);
    CHECK_FALSE(rep.final.has_value());
  }
}

TEST_CASE("minimal and maximal solutions at large lambda") {
  auto m = mesh256();
  const ProblemInstance inst = instance(m, 1e11);
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  ExtremalDiagnostics d;
  const IterationReport lo = solve_extremal(inst, Extremal::Minimal, cfg, &d);
  const IterationReport hi = solve_extremal(inst, Extremal::Maximal, cfg);
  REQUIRE(lo.converged());
  REQUIRE(hi.converged());
  CHECK(d.psi_subsolution);
  CHECK(d.psi_below_phi);
  CHECK((lo.final->values - hi.final->values).maxCoeff() <= 1e-10 * hi.final->sup_norm());
  CHECK((d.psi->values - lo.final->values).maxCoeff() <= 1e-10 * hi.final->sup_norm());
  CHECK(lo.c_lower > 0.0);
  CHECK(hi.c_lower > 0.0);
  CHECK(lo.final_residual <= std::max(10 * cfg.tol_inner, residual_roundoff_floor(*lo.final, reaction_load(*lo.final, inst.reaction()), inst.exp, 1.0)));
  // Ascending history increases.
  for (const auto& s : lo.history) CHECK(s.min_interior > 0.0);

  SUBCASE("iterating from the minimal solution stays below the maximal one") {
    const IterationReport r = monotone_iterate(*lo.final, Direction::Ascending, inst, cfg);
    REQUIRE(r.converged());
    CHECK((r.final->values - hi.final->values).maxCoeff() <= 1e-10 * hi.final->sup_norm());
  }
}

TEST_CASE("monotone_iterate rejects inadmissible starts") {
  auto m = build_interval_mesh(0, 1, 128);
  const ProblemInstance inst = instance(m, 100.0);
  const SolverConfig cfg = SolverConfig::defaults_for(*m);
  const ExponentSet e = standard();
  const ScalarField psi = build_subsolution_psi(principal_eigenpair(m), 100.0, pick_r_exponent(e), e.beta);
  const IterationReport r = monotone_iterate(psi, Direction::Ascending, inst, cfg);
  CHECK(r.status == IterationStatus::InadmissibleLambda);
  CHECK(r.message.find("subsolution") != std::string::npos);
  CHECK(monotone_iterate(ScalarField::zero(m), Direction::Descending, inst, cfg).status ==
        IterationStatus::InadmissibleLambda);
}

TEST_CASE("existence threshold bracket and resolution stability") {
  std::vector<double> mids;
  for (int n : {128, 256}) {
    auto m = build_interval_mesh(0, 1, n);
    SolverConfig cfg = SolverConfig::defaults_for(*m);
    cfg.max_outer_iters = 2000;
    const ThresholdBracket br = existence_threshold([&](double l) { return instance(m, l); }, 0.01, 1e4, 0.05, cfg);
    REQUIRE(br.ok);
    CHECK(br.relative_width() <= 0.05);
    CHECK(br.lambda_lo < br.lambda_hi);
    mids.push_back(std::sqrt(br.lambda_lo * br.lambda_hi));
    bool seen = false;
    for (const auto& s : br.samples) {
      if (s.status == IterationStatus::Converged) seen = true;
      else CHECK_FALSE(seen);
    }
  }
  CHECK(std::abs(mids[0] - mids[1]) <= 0.1 * mids[1]);
}

TEST_CASE("threshold search reports missing preconditions") {
  auto m = build_interval_mesh(0, 1, 128);
  SolverConfig cfg = SolverConfig::defaults_for(*m);
  const ThresholdBracket none = existence_threshold([&](double l) { return instance(m, l); }, 0.01, 100.0, 0.05, cfg);
  CHECK_FALSE(none.ok);
  CHECK(none.message.find("lambda_hi") != std::string::npos);
  cfg.max_outer_iters = 2;
  const ThresholdBracket indet = existence_threshold([&](double l) { return instance(m, l); }, 0.01, 1e4, 0.05, cfg);
  CHECK_FALSE(indet.ok);
  CHECK(indet.message.find("indeterminate") != std::string::npos);
  CHECK_THROWS(existence_threshold([&](double l) { return instance(m, l); }, 10.0, 1.0, 0.05, cfg));
}
