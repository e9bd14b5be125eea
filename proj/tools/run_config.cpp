#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pqsolve {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(line, "expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v, int line) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(line, "expected an integer, got '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), line));
  if (out.empty()) throw ConfigError(line, "empty list");
  return out;
}

struct Entry {
  std::string value;
  int line;
};
using Scope = std::map<std::string, Entry>;

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [](double RunConfig::*field) {
      return [field](RunConfig& c, const std::string& v, int l) { c.*field = to_double(v, l); };
    };
    auto expnum = [](double pqlap::ExponentSet::*field) {
      return [field](RunConfig& c, const std::string& v, int l) { c.exp.*field = to_double(v, l); };
    };
    t["domain"] = [](RunConfig& c, const std::string& v, int l) {
      if (v == "interval") c.domain = pqlap::DomainKind::Interval;
      else if (v == "unit_square") c.domain = pqlap::DomainKind::UnitSquare;
      else if (v == "disk") c.domain = pqlap::DomainKind::Disk;
      else throw ConfigError(l, "domain must be interval, unit_square or disk");
    };
    t["a"] = num(&RunConfig::a);
    t["b"] = num(&RunConfig::b);
    t["radius"] = num(&RunConfig::radius);
    t["h_target"] = num(&RunConfig::h_target);
    t["mesh_n"] = [](RunConfig& c, const std::string& v, int l) { c.mesh_n = to_int(v, l); };
    t["p"] = expnum(&pqlap::ExponentSet::p);
    t["q"] = expnum(&pqlap::ExponentSet::q);
    t["beta"] = expnum(&pqlap::ExponentSet::beta);
    t["sigma"] = expnum(&pqlap::ExponentSet::sigma);
    t["A"] = expnum(&pqlap::ExponentSet::A);
    t["B"] = expnum(&pqlap::ExponentSet::B);
    t["gamma_growth"] = [](RunConfig& c, const std::string& v, int l) {
      c.exp.gamma_growth = to_double(v, l);
      c.gamma_given = true;
    };
    t["nonlinearity"] = [](RunConfig& c, const std::string& v, int l) {
      if (v != "power_shifted" && v != "table") throw ConfigError(l, "nonlinearity must be power_shifted or table");
      c.nonlinearity = v;
    };
    t["table_s"] = [](RunConfig& c, const std::string& v, int l) { c.table_s = to_list(v, l); };
    t["table_f"] = [](RunConfig& c, const std::string& v, int l) { c.table_f = to_list(v, l); };
    t["growth_hint"] = num(&RunConfig::growth_hint);
    t["coeff_q"] = num(&RunConfig::coeff_q);
    t["lambda"] = [](RunConfig& c, const std::string& v, int l) { c.lambda = to_double(v, l); };
    t["lambda_list"] = [](RunConfig& c, const std::string& v, int l) {
      c.lambda_list = to_list(v, l);
      for (std::size_t k = 1; k < c.lambda_list.size(); ++k)
        if (!(c.lambda_list[k] > c.lambda_list[k - 1])) throw ConfigError(l, "lambda_list must be strictly increasing");
    };
    t["lambda_lo"] = num(&RunConfig::lambda_lo);
    t["lambda_hi"] = num(&RunConfig::lambda_hi);
    t["tol_lambda"] = num(&RunConfig::tol_lambda);
    t["scan_points"] = [](RunConfig& c, const std::string& v, int l) { c.scan_points = to_int(v, l); };
    t["which"] = [](RunConfig& c, const std::string& v, int l) {
      if (v != "minimal" && v != "maximal") throw ConfigError(l, "which must be minimal or maximal");
      c.which = v;
    };
    t["alpha"] = num(&RunConfig::alpha);
    t["oracle_tol"] = num(&RunConfig::oracle_tol);
    t["random_pairs"] = [](RunConfig& c, const std::string& v, int l) { c.random_pairs = to_int(v, l); };
    t["tol_inner"] = [](RunConfig& c, const std::string& v, int l) {
      c.solver.tol_inner = to_double(v, l);
      c.tol_inner_given = true;
    };
    t["tol_outer"] = [](RunConfig& c, const std::string& v, int l) { c.solver.tol_outer = to_double(v, l); };
    t["eps_reg"] = [](RunConfig& c, const std::string& v, int l) { c.solver.eps_reg = to_double(v, l); };
    t["max_inner_iters"] = [](RunConfig& c, const std::string& v, int l) { c.solver.max_inner_iters = to_int(v, l); };
    t["max_outer_iters"] = [](RunConfig& c, const std::string& v, int l) { c.solver.max_outer_iters = to_int(v, l); };
    t["out"] = [](RunConfig& c, const std::string& v, int) { c.out_dir = v; };
    return t;
  }();
  return table;
}

const char* const kExponentKeys[] = {"p", "q", "beta", "sigma", "gamma_growth", "A", "B"};

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "sweep") return Command::Sweep;
  if (name == "threshold") return Command::Threshold;
  if (name == "verify") return Command::Verify;
  if (name == "oracle") return Command::Oracle;
  throw std::invalid_argument("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Sweep: return "sweep";
    case Command::Threshold: return "threshold";
    case Command::Verify: return "verify";
    case Command::Oracle: return "oracle";
  }
  return "?";
}

RunConfig parse_config(const std::string& text, Command command) {
  std::map<std::string, Scope> scopes;  // "" holds the global keys
  std::string section;
  std::istringstream in(text);
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      try {
        parse_command(section);
      } catch (const std::invalid_argument&) {
        throw ConfigError(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    if (!setters().count(key)) throw ConfigError(line, "unknown key '" + key + "'");
    auto& scope = scopes[section];
    if (scope.count(key))
      throw ConfigError(line, "duplicate key '" + key + "' (first set on line " + std::to_string(scope[key].line) + ")");
    scope[key] = {value, line};
  }

  RunConfig cfg;
  cfg.command = command;
  Scope merged = scopes[""];
  for (const auto& [k, e] : scopes[command_name(command)]) merged[k] = e;
  // Validate keys of other sections too, so typos surface regardless of the command run.
  for (const auto& [name, scope] : scopes) {
    if (name.empty() || name == command_name(command)) continue;
    RunConfig scratch;
    for (const auto& [k, e] : scope) setters().at(k)(scratch, e.value, e.line);
  }
  for (const auto& [k, e] : merged) setters().at(k)(cfg, e.value, e.line);

  int exp_line = 0;
  for (const char* k : kExponentKeys)
    if (merged.count(k)) exp_line = std::max(exp_line, merged[k].line);
  if (!cfg.gamma_given) cfg.exp.gamma_growth = cfg.exp.sigma < 1.0 ? cfg.exp.sigma + cfg.exp.beta : cfg.exp.beta;
  try {
    cfg.exp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(exp_line, e.what());
  }
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (cfg.lambda && !(*cfg.lambda > 0.0)) throw ConfigError(merged["lambda"].line, "lambda must be positive");
  if (cfg.mesh_n < 2) throw ConfigError(merged["mesh_n"].line, "mesh_n must be >= 2");
  if (!(cfg.h_target > 0.0)) throw ConfigError(merged["h_target"].line, "h_target must be positive");
  return cfg;
}

RunConfig load_config(const std::string& path, Command command) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), command);
}

pqlap::MeshPtr RunConfig::build_mesh() const {
  switch (domain) {
    case pqlap::DomainKind::Interval: return pqlap::build_interval_mesh(a, b, mesh_n);
    case pqlap::DomainKind::UnitSquare: return pqlap::build_unit_square_mesh(h_target);
    case pqlap::DomainKind::Disk: return pqlap::build_disk_mesh(radius, h_target);
  }
  throw std::logic_error("unreachable domain kind");
}

pqlap::Nonlinearity RunConfig::build_nonlinearity() const {
  if (nonlinearity == "table") return pqlap::Nonlinearity(pqlap::TabulatedNonlinearity{table_s, table_f, growth_hint}, exp);
  return pqlap::Nonlinearity(pqlap::PowerShifted{exp.sigma}, exp);
}

pqlap::SolverConfig RunConfig::solver_for(const pqlap::Mesh& mesh) const {
  pqlap::SolverConfig s = solver;
  if (!tol_inner_given) s.tol_inner = pqlap::SolverConfig::defaults_for(mesh).tol_inner;
  return s;
}

}  // namespace pqsolve
