#pragma once

#include "pqlap/amann.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqsolve {

/// Parse failure with the 1-based line it refers to (0 when not tied to a line).
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

enum class Command { Solve, Sweep, Threshold, Verify, Oracle };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct RunConfig {
  Command command = Command::Solve;

  pqlap::DomainKind domain = pqlap::DomainKind::Interval;
  double a = 0.0, b = 1.0;  // interval
  double radius = 1.0;      // disk
  int mesh_n = 256;         // interval subintervals
  double h_target = 1.0 / 32.0;

  pqlap::ExponentSet exp;
  bool gamma_given = false;
  std::string nonlinearity = "power_shifted";
  std::vector<double> table_s, table_f;
  double growth_hint = 1.0;
  double coeff_q = 1.0;

  std::optional<double> lambda;
  std::vector<double> lambda_list;
  double lambda_lo = 0.01, lambda_hi = 100.0, tol_lambda = 0.05;
  int scan_points = 9;
  std::string which = "maximal";
  double alpha = 1.5;
  double oracle_tol = 0.02;
  int random_pairs = 100;

  pqlap::SolverConfig solver;
  bool tol_inner_given = false;
  std::string out_dir = ".";

  pqlap::MeshPtr build_mesh() const;
  pqlap::Nonlinearity build_nonlinearity() const;
  pqlap::SolverConfig solver_for(const pqlap::Mesh& mesh) const;
};

/// Flat `key = value` text. Keys before any `[section]` header apply to every
/// command; keys inside `[solve]`, `[sweep]`, `[threshold]`, `[verify]` or
/// `[oracle]` apply only when that command runs and override global ones.
/// `#` starts a comment. Lists are comma-separated.
RunConfig parse_config(const std::string& text, Command command);
RunConfig load_config(const std::string& path, Command command);

struct RunOptions {
  std::uint64_t seed = 12345;
  std::optional<std::string> out_dir;
};

/// Runs the command, writes report.json (and fields.csv where applicable)
/// into the output directory and returns the process exit code:
/// 0 success, 2 no positive solution, 1 any other failure.
int run(const RunConfig& cfg, const RunOptions& opts);

}  // namespace pqsolve
