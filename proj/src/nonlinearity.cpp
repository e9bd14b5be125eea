#include "pqlap/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pqlap {

Nonlinearity::Nonlinearity(PowerShifted kind, ExponentSet exp) : kind_(kind), exp_(exp) {
  exp_.validate();
  if (!(kind.sigma > 0.0)) throw std::invalid_argument("power_shifted: sigma must be positive");
  if (kind.sigma != exp_.sigma) throw std::invalid_argument("power_shifted: sigma differs from the exponent set");
  beta0_ = 1.0;
}

Nonlinearity::Nonlinearity(TabulatedNonlinearity kind, ExponentSet exp) : kind_(std::move(kind)), exp_(exp) {
  exp_.validate();
  const auto& t = std::get<TabulatedNonlinearity>(kind_);
  if (t.s.size() < 2 || t.s.size() != t.f.size()) throw std::invalid_argument("table: need >= 2 (s, f) pairs");
  if (t.s.front() != 0.0) throw std::invalid_argument("table: first abscissa must be 0");
  for (std::size_t k = 1; k < t.s.size(); ++k) {
    if (!(t.s[k] > t.s[k - 1])) throw std::invalid_argument("table: abscissae must increase strictly");
    if (t.f[k] < t.f[k - 1]) throw std::invalid_argument("table: values must be nondecreasing");
  }
  if (!(t.f.front() < 0.0)) throw std::invalid_argument("table: need f(0) < 0");
  if (!(t.f.back() > 0.0)) throw std::invalid_argument("table: f must become positive");
  if (!(t.growth_hint > 0.0)) throw std::invalid_argument("table: growth_hint must be positive");
  beta0_ = compute_beta0();
}

double Nonlinearity::f(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("f: negative argument");
  if (const auto* ps = std::get_if<PowerShifted>(&kind_)) return std::pow(s, ps->sigma + exp_.beta) - 1.0;
  const auto& t = std::get<TabulatedNonlinearity>(kind_);
  if (s >= t.s.back()) return t.f.back() * std::pow(s / t.s.back(), t.growth_hint);
  const auto it = std::upper_bound(t.s.begin(), t.s.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - t.s.begin());
  const double w = (s - t.s[k - 1]) / (t.s[k] - t.s[k - 1]);
  return (1.0 - w) * t.f[k - 1] + w * t.f[k];
}

double Nonlinearity::compute_beta0() const {
  double lo = 0.0, hi = 1.0;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::invalid_argument("nonlinearity: f never becomes positive");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double Nonlinearity::growth_exponent() const {
  if (const auto* ps = std::get_if<PowerShifted>(&kind_)) return ps->sigma + exp_.beta;
  const double s1 = 1e5, s2 = 1e6;
  return std::log(f(s2) / f(s1)) / std::log(s2 / s1);
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  if (const auto* ps = std::get_if<PowerShifted>(&kind_))
    os << "power_shifted(sigma=" << ps->sigma << ", beta=" << exp_.beta << ")";
  else
    os << "table(" << std::get<TabulatedNonlinearity>(kind_).s.size() << " points)";
  return os.str();
}

double g_eval(const Nonlinearity& nl, double lambda, double u) {
  if (!(u > 0.0)) throw std::domain_error("g: argument must be positive");
  return lambda * nl.f(u) / std::pow(u, nl.exponents().beta);
}

std::vector<double> hypothesis_grid() {
  std::vector<double> grid(200);
  for (int k = 0; k < 200; ++k) grid[k] = std::pow(10.0, -6.0 + 12.0 * k / 199.0);
  return grid;
}

const HypothesisCheck& HypothesisReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("hypothesis report: no check named " + name);
}

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

HypothesisReport validate_hypotheses(const Nonlinearity& nl) {
  const double beta = nl.exponents().beta;
  const auto grid = hypothesis_grid();
  HypothesisReport rep;

  {
    HypothesisCheck h1{"H1", true, ""};
    const double f0 = nl.f(0.0);
    std::ostringstream why;
    if (!(f0 < 0.0)) {
      h1.pass = false;
      why << "f(0)=" << f0 << " not negative; ";
    }
    double prev_f = f0, prev_ratio = -INFINITY;
    for (double s : grid) {
      const double fs = nl.f(s);
      const double ratio = fs / std::pow(s, beta);
      if (fs < prev_f) {
        h1.pass = false;
        why << "f decreases at s=" << s << "; ";
        break;
      }
      if (ratio < prev_ratio) {
        h1.pass = false;
        why << "f/s^beta decreases at s=" << s << "; ";
        break;
      }
      prev_f = fs;
      prev_ratio = ratio;
    }
    if (h1.pass) why << "f(0)=" << f0 << ", f and f/s^beta nondecreasing on sampled grid";
    h1.witness = why.str();
    rep.checks.push_back(h1);
  }

  {
    HypothesisCheck h2{"H2", false, "no sample with f(t)/t^beta > 0"};
    for (double s : grid) {
      if (nl.f(s) > 0.0) {
        h2.pass = true;
        std::ostringstream os;
        os << "f(t)/t^beta > 0 at t=" << s;
        h2.witness = os.str();
        break;
      }
    }
    rep.checks.push_back(h2);
  }

  const double kappa = nl.growth_exponent();
  rep.growth_exponent = kappa;

  {
    // Lower growth f(s) >= A s^kappa on the top decade of the grid.
    HypothesisCheck h3{"H3", false, ""};
    double a_min = INFINITY;
    for (double s : grid)
      if (s >= 1e5) a_min = std::min(a_min, nl.f(s) / std::pow(s, kappa));
    rep.A_witness = a_min;
    h3.pass = kappa > 0.0 && kappa < beta + 1.0 && a_min > 0.0;
    std::ostringstream os;
    os << "growth exponent " << kappa << (h3.pass ? " in (0, beta+1)" : " not in (0, beta+1)") << ", A >= "
       << a_min;
    h3.witness = os.str();
    rep.checks.push_back(h3);
  }

  {
    // Upper bound f(s) <= B s^gamma for all s >= 0 with gamma = max(kappa, beta).
    HypothesisCheck h4{"H4", false, ""};
    const double gamma = std::max(kappa, beta);
    double b_max = 0.0;
    for (double s : grid) b_max = std::max(b_max, nl.f(s) / std::pow(s, gamma));
    rep.B_witness = b_max;
    h4.pass = gamma < beta + 1.0;
    std::ostringstream os;
    os << "gamma = " << gamma << (h4.pass ? " < beta+1" : " >= beta+1") << ", B >= " << b_max;
    h4.witness = os.str();
    rep.checks.push_back(h4);
  }
  return rep;
}

}  // namespace pqlap
