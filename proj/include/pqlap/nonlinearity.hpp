#pragma once

#include "pqlap/fem.hpp"

#include <string>
#include <variant>
#include <vector>

namespace pqlap {

/// f(s) = s^{sigma+beta} - 1.
struct PowerShifted {
  double sigma;
};

/// Monotone table (s_k, f_k) with s_0 = 0, linearly interpolated. Beyond the
/// last abscissa f continues as f_last * (s / s_last)^growth_hint.
struct TabulatedNonlinearity {
  std::vector<double> s;
  std::vector<double> f;
  double growth_hint = 1.0;
};

class Nonlinearity {
public:
  Nonlinearity(PowerShifted kind, ExponentSet exp);
  Nonlinearity(TabulatedNonlinearity kind, ExponentSet exp);

  const ExponentSet& exponents() const { return exp_; }
  bool is_power_shifted() const { return std::holds_alternative<PowerShifted>(kind_); }
  const std::variant<PowerShifted, TabulatedNonlinearity>& kind() const { return kind_; }

  /// f(s); rejects s < 0.
  double f(double s) const;
  /// inf { t > 0 : f(t)/t^beta > 0 }.
  double beta0() const { return beta0_; }
  /// Growth exponent of f at infinity (exact for power_shifted, fitted otherwise).
  double growth_exponent() const;

  std::string describe() const;

private:
  double compute_beta0() const;

  std::variant<PowerShifted, TabulatedNonlinearity> kind_;
  ExponentSet exp_;
  double beta0_ = 1.0;
};

/// lambda f(u) / u^beta; rejects u <= 0.
double g_eval(const Nonlinearity& spec, double lambda, double u);

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  std::string witness;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;  // H1..H4 in order
  double growth_exponent = 0.0;
  double A_witness = 0.0;
  double B_witness = 0.0;
  bool sampled = true;

  const HypothesisCheck& get(const std::string& name) const;
  bool all_pass() const;
};

/// Sampling-based check of the structural hypotheses on f over 200
/// log-spaced points in [1e-6, 1e6].
HypothesisReport validate_hypotheses(const Nonlinearity& spec);

/// 200 log-spaced sample points in [1e-6, 1e6].
std::vector<double> hypothesis_grid();

}  // namespace pqlap
