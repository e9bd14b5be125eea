#include "run_config.hpp"

#include "pqlap/verify.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

namespace pqsolve {

using json = nlohmann::ordered_json;
using namespace pqlap;

namespace {

struct Column {
  std::string name;
  const Eigen::VectorXd* values;
};

void write_fields(const std::filesystem::path& path, const Mesh& mesh, const std::vector<Column>& cols) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::fprintf(f, "node,x");
  if (mesh.dim() == 2) std::fprintf(f, ",y");
  std::fprintf(f, ",d");
  for (const auto& c : cols) std::fprintf(f, ",%s", c.name.c_str());
  std::fprintf(f, "\n");
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::fprintf(f, "%d", i);
    for (int k = 0; k < mesh.dim(); ++k) std::fprintf(f, ",%.17g", mesh.node(i)[k]);
    std::fprintf(f, ",%.17g", mesh.distance(i));
    for (const auto& c : cols) std::fprintf(f, ",%.17g", (*c.values)[i]);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

json describe(const RunConfig& cfg, const Mesh& mesh, std::uint64_t seed) {
  json j;
  j["command"] = command_name(cfg.command);
  j["seed"] = seed;
  const char* kinds[] = {"interval", "unit_square", "disk"};
  j["domain"] = kinds[static_cast<int>(mesh.kind())];
  j["nodes"] = mesh.num_nodes();
  j["elements"] = mesh.num_elements();
  j["h"] = mesh.max_element_diameter();
  j["exponents"] = {{"p", cfg.exp.p},         {"q", cfg.exp.q}, {"beta", cfg.exp.beta},
                    {"sigma", cfg.exp.sigma}, {"gamma_growth", cfg.exp.gamma_growth},
                    {"A", cfg.exp.A},         {"B", cfg.exp.B}};
  j["coeff_q"] = cfg.coeff_q;
  return j;
}

json to_json(const HypothesisReport& h) {
  json j;
  for (const auto& c : h.checks) j[c.name] = {{"pass", c.pass}, {"witness", c.witness}};
  j["growth_exponent"] = h.growth_exponent;
  j["all_pass"] = h.all_pass();
  return j;
}

double require_lambda(const RunConfig& cfg) {
  if (!cfg.lambda) throw ConfigError(0, "command " + command_name(cfg.command) + " needs 'lambda'");
  return *cfg.lambda;
}

int run_solve(const RunConfig& cfg, const MeshPtr& mesh, json& report, const std::filesystem::path& out) {
  const double lambda = require_lambda(cfg);
  const SolverConfig solver = cfg.solver_for(*mesh);
  ProblemInstance inst{mesh, cfg.exp, cfg.build_nonlinearity(), lambda, cfg.coeff_q};
  report["lambda"] = lambda;
  report["which"] = cfg.which;
  report["nonlinearity"] = inst.nonlinearity.describe();
  report["hypotheses"] = to_json(validate_hypotheses(inst.nonlinearity));

  ExtremalDiagnostics diag;
  const IterationReport rep =
      solve_extremal(inst, cfg.which == "minimal" ? Extremal::Minimal : Extremal::Maximal, solver, &diag);
  report["status"] = to_string(rep.status);
  report["direction"] = to_string(rep.direction);
  report["message"] = rep.message;
  report["n_outer"] = rep.n_outer;
  report["psi_subsolution"] = diag.psi_subsolution;
  report["psi_below_phi"] = diag.psi_below_phi;
  report["r_exponent"] = diag.r_exponent;

  std::vector<Column> cols;
  if (rep.converged()) {
    report["residual"] = rep.final_residual;
    report["c_lower"] = rep.c_lower;
    report["sup_norm"] = rep.final->sup_norm();
    report["distance_bound"] = check_distance_bound(*rep.final);
    cols.push_back({"u", &rep.final->values});
  }
  if (diag.psi) cols.push_back({"psi", &diag.psi->values});
  if (diag.phi) cols.push_back({"phi", &diag.phi->values});
  write_fields(out / "fields.csv", *mesh, cols);

  if (rep.converged()) return 0;
  return rep.status == IterationStatus::NoPositiveSolution ? 2 : 1;
}

int run_sweep(const RunConfig& cfg, const MeshPtr& mesh, json& report, const std::filesystem::path& out) {
  if (cfg.lambda_list.empty()) throw ConfigError(0, "command sweep needs 'lambda_list'");
  const ScalingReport s = scaling_sweep(mesh, cfg.exp, cfg.lambda_list, cfg.solver_for(*mesh), cfg.coeff_q);
  report["status"] = s.complete ? "Converged" : "Failed";
  report["message"] = s.message;
  report["lambdas"] = s.lambdas;
  report["sup_values"] = s.sup_values;
  report["slope_fit"] = s.slope_fit;
  report["expected_slope"] = s.expected;
  report["gamma_scales"] = s.gamma_scales;
  report["linf_rescaled"] = s.linf_rescaled;
  report["ratio_min"] = s.ratio_min;
  report["ratio_max"] = s.ratio_max;
  report["monotone_in_lambda"] = s.monotone_in_lambda;
  if (!s.linf_rescaled.empty()) {
    const auto [lo, hi] = std::minmax_element(s.linf_rescaled.begin(), s.linf_rescaled.end());
    report["rescaled_spread"] = *hi / *lo;
  }
  std::vector<Column> cols;
  for (std::size_t k = 0; k < s.fields.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "phi_lambda_%g", s.lambdas[k]);
    cols.push_back({name, &s.fields[k].values});
  }
  write_fields(out / "fields.csv", *mesh, cols);
  return s.complete ? 0 : 1;
}

int run_threshold(const RunConfig& cfg, const MeshPtr& mesh, json& report) {
  const Nonlinearity f = cfg.build_nonlinearity();
  const ThresholdBracket br = existence_threshold(
      [&](double l) { return ProblemInstance{mesh, cfg.exp, f, l, cfg.coeff_q}; }, cfg.lambda_lo, cfg.lambda_hi,
      cfg.tol_lambda, cfg.solver_for(*mesh), cfg.scan_points);
  report["status"] = br.ok ? "Converged" : "Failed";
  report["message"] = br.message;
  report["search_lo"] = cfg.lambda_lo;
  report["search_hi"] = cfg.lambda_hi;
  if (br.ok) {
    report["lambda_lo"] = br.lambda_lo;
    report["lambda_hi"] = br.lambda_hi;
    report["relative_width"] = br.relative_width();
  }
  json samples = json::array();
  for (const auto& s : br.samples) samples.push_back({{"lambda", s.lambda}, {"status", to_string(s.status)}});
  report["samples"] = samples;
  if (br.ok) return 0;
  const bool none_exist = !br.samples.empty() && std::all_of(br.samples.begin(), br.samples.end(), [](auto& s) {
    return s.status == IterationStatus::NoPositiveSolution;
  });
  return none_exist ? 2 : 1;
}

double exact_lambda1(const RunConfig& cfg) {
  constexpr double pi = std::numbers::pi;
  constexpr double j01 = 2.404825557695773;
  switch (cfg.domain) {
    case DomainKind::Interval: return pi * pi / ((cfg.b - cfg.a) * (cfg.b - cfg.a));
    case DomainKind::UnitSquare: return 2.0 * pi * pi;
    case DomainKind::Disk: return j01 * j01 / (cfg.radius * cfg.radius);
  }
  return NAN;
}

ScalarField random_positive_field(const MeshPtr& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  ScalarField u = ScalarField::zero(mesh);
  for (int i : mesh->interior_nodes()) u.values[i] = dist(rng);
  return u;
}

int run_verify(const RunConfig& cfg, const MeshPtr& mesh, json& report, std::uint64_t seed) {
  const double lambda = require_lambda(cfg);
  const SolverConfig solver = cfg.solver_for(*mesh);
  ProblemInstance inst{mesh, cfg.exp, cfg.build_nonlinearity(), lambda, cfg.coeff_q};
  bool all = true;
  report["lambda"] = lambda;

  const HypothesisReport hyp = validate_hypotheses(inst.nonlinearity);
  report["hypotheses"] = to_json(hyp);
  all = all && hyp.all_pass();

  const Eigenpair eig = principal_eigenpair(mesh);
  const double exact = exact_lambda1(cfg);
  report["eigenpair"] = {{"lambda1", eig.lambda1},
                         {"exact", exact},
                         {"relative_error", std::abs(eig.lambda1 - exact) / exact},
                         {"iterations", eig.iterations}};

  const ScalarField psi = build_subsolution_psi(eig, lambda, pick_r_exponent(cfg.exp), cfg.exp.beta);
  const ViolationReport vpsi = verify_weak_subsolution(psi, reaction_load(psi, inst.reaction()), cfg.exp, cfg.coeff_q);
  report["psi"] = {{"pass", vpsi.pass}, {"max_violation", vpsi.max_violation}, {"slack", vpsi.slack}};
  all = all && vpsi.pass;

  const BallSupersolution ball = build_supersolution_ball(mesh, cfg.exp, lambda, psi);
  const ViolationReport vball =
      verify_weak_supersolution(ball.phi, reaction_load(ball.phi, inst.reaction()), cfg.exp, cfg.coeff_q);
  report["ball_supersolution"] = {{"pass", vball.pass},       {"max_violation", vball.max_violation},
                                  {"slack", vball.slack},     {"m", ball.m},
                                  {"doublings", ball.doublings}, {"radius", ball.radius}};
  all = all && vball.pass;

  if (cfg.exp.sigma < cfg.exp.q - 1.0 && cfg.exp.q > 2.0) {
    const GlobalSupersolution g = solve_global_supersolution(mesh, cfg.exp, lambda, solver, &eig, cfg.alpha);
    const ComparisonReport c = comparison_test(g.xi, g.phi, power_reaction(lambda, cfg.exp.sigma), cfg.exp);
    report["comparison_xi_phi"] = {{"pass", c.pass},           {"max_excess", c.max_excess},
                                   {"epsilon", g.epsilon},     {"limits_agree", g.limits_agree},
                                   {"limit_gap", g.limit_gap}};
    all = all && c.pass;
  }

  std::mt19937_64 rng(seed);
  double picone = -INFINITY, lindqvist = -INFINITY;
  for (int k = 0; k < cfg.random_pairs; ++k) {
    const ScalarField u1 = random_positive_field(mesh, rng), u2 = random_positive_field(mesh, rng);
    picone = std::max(picone, picone_pointwise_check(u1, u2, cfg.exp).max_violation);
    if (cfg.exp.q >= 2.0) lindqvist = std::max(lindqvist, lindqvist_term_check(u1, u2, cfg.exp.q).max_violation);
  }
  report["picone"] = {{"pairs", cfg.random_pairs}, {"max_violation", picone}, {"pass", picone <= 1e-10}};
  all = all && picone <= 1e-10;
  if (cfg.exp.q >= 2.0) {
    report["lindqvist"] = {{"pairs", cfg.random_pairs}, {"max_violation", lindqvist}, {"pass", lindqvist <= 1e-10}};
    all = all && lindqvist <= 1e-10;
  }
  report["status"] = all ? "Pass" : "Fail";
  return all ? 0 : 1;
}

int run_oracle(const RunConfig& cfg, const MeshPtr& mesh, json& report, const std::filesystem::path& out) {
  const double lambda = require_lambda(cfg);
  int dim = 1;
  double R = 0.0;
  if (cfg.domain == DomainKind::Disk) {
    dim = 2;
    R = cfg.radius;
  } else if (cfg.domain == DomainKind::Interval) {
    R = 0.5 * (cfg.b - cfg.a);
  } else {
    throw ConfigError(0, "oracle needs a ball domain (interval or disk)");
  }
  const Reaction reaction = power_reaction(lambda, cfg.exp.sigma);
  const RadialProfile prof = radial_shoot(cfg.exp, cfg.coeff_q, reaction, R, dim);
  IterationReport it;
  const ScalarField fem =
      solve_global_supersolution_descending(mesh, cfg.exp, lambda, cfg.solver_for(*mesh), &it, cfg.coeff_q);

  Eigen::VectorXd radial(mesh->num_nodes());
  double max_diff = 0.0;
  for (int i = 0; i < mesh->num_nodes(); ++i) {
    radial[i] = prof.value_at((mesh->node(i) - mesh->center()).norm());
    max_diff = std::max(max_diff, std::abs(radial[i] - fem.values[i]));
  }
  const double rel = std::abs(fem.sup_norm() - prof.center_value()) / prof.center_value();
  const bool pass = rel <= cfg.oracle_tol;
  report["lambda"] = lambda;
  report["status"] = pass ? "Pass" : "Fail";
  report["shooting_center_value"] = prof.center_value();
  report["shooting_points"] = prof.r_grid.size();
  report["fem_sup"] = fem.sup_norm();
  report["relative_sup_difference"] = rel;
  report["max_nodal_difference"] = max_diff;
  report["tolerance"] = cfg.oracle_tol;
  report["n_outer"] = it.n_outer;
  write_fields(out / "fields.csv", *mesh, {{"u_fem", &fem.values}, {"u_radial", &radial}});
  return pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& cfg, const RunOptions& opts) {
  const std::filesystem::path out = opts.out_dir.value_or(cfg.out_dir);
  std::filesystem::create_directories(out);
  const MeshPtr mesh = cfg.build_mesh();
  json report = describe(cfg, *mesh, opts.seed);
  int code = 1;
  try {
    switch (cfg.command) {
      case Command::Solve: code = run_solve(cfg, mesh, report, out); break;
      case Command::Sweep: code = run_sweep(cfg, mesh, report, out); break;
      case Command::Threshold: code = run_threshold(cfg, mesh, report); break;
      case Command::Verify: code = run_verify(cfg, mesh, report, opts.seed); break;
      case Command::Oracle: code = run_oracle(cfg, mesh, report, out); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    report["status"] = "Error";
    report["message"] = e.what();
    code = 1;
  }
  report["exit_code"] = code;
  std::ofstream(out / "report.json") << report.dump(2) << "\n";
  return code;
}

}  // namespace pqsolve
