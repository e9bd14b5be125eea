#include "pqlap/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace pqlap {

double RadialProfile::value_at(double r) const {
  r = std::clamp(r, 0.0, radius());
  auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
  std::size_t k = it == r_grid.end() ? r_grid.size() - 1 : static_cast<std::size_t>(it - r_grid.begin());
  if (k == 0) k = 1;
  const double r0 = r_grid[k - 1], r1 = r_grid[k], h = r1 - r0;
  const double t = (r - r0) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * values[k - 1] + h10 * h * slopes[k - 1] + h01 * values[k] + h11 * h * slopes[k];
}

double invert_pq_flux(double y, double p, double q, double coeff_q) {
  if (y == 0.0) return 0.0;
  const double target = std::abs(y);
  auto F = [&](double s) { return std::pow(s, p - 1.0) + coeff_q * std::pow(s, q - 1.0); };
  auto dF = [&](double s) { return (p - 1.0) * std::pow(s, p - 2.0) + coeff_q * (q - 1.0) * std::pow(s, q - 2.0); };
  double lo = 0.0;
  double hi = std::pow(target, 1.0 / (p - 1.0));
  if (coeff_q > 0.0) hi = std::min(hi, std::pow(target / coeff_q, 1.0 / (q - 1.0)));
  double s = hi;
  for (int k = 0; k < 200; ++k) {
    const double val = F(s) - target;
    if (val > 0.0) hi = s; else lo = s;
    double next = s - val / dF(s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - s) <= 4e-16 * s || hi - lo <= 4e-16 * hi;
    s = next;
    if (done) break;
  }
  return y > 0.0 ? s : -s;
}

namespace {

struct ShotResult {
  double end_value = 0.0;
  bool crossed = false;
  std::vector<double> r, u, du;
};

// Dormand-Prince 5(4) on y = (u, r^{N-1} * flux(u')).
ShotResult integrate_shot(double u0, const ExponentSet& exp, double coeff_q, const Reaction& reaction, double R,
                          int N, bool keep) {
  using State = std::array<double, 2>;
  const double nm1 = N - 1.0;
  auto slope_of = [&](double r, const State& y) {
    if (r == 0.0) return N == 1 ? invert_pq_flux(y[1], exp.p, exp.q, coeff_q) : 0.0;
    return invert_pq_flux(y[1] / std::pow(r, nm1), exp.p, exp.q, coeff_q);
  };
  auto rhs = [&](double r, const State& y) -> State {
    const double react = reaction(std::max(y[0], 0.0));
    return {slope_of(r, y), -std::pow(r, nm1) * react};
  };

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  ShotResult out;
  State y{u0, 0.0};
  double r = 0.0, h = 1e-4 * R;
  if (keep) {
    out.r.push_back(0.0);
    out.u.push_back(u0);
    out.du.push_back(0.0);
  }
  State k1 = rhs(r, y);
  for (int steps = 0; r < R; ++steps) {
    if (steps > 2000000) throw std::runtime_error("radial_shoot: step limit reached");
    h = std::min(h, R - r);
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State s = y;
      for (auto [c, k] : terms)
        for (int i = 0; i < 2; ++i) s[i] += h * c * (*k)[i];
      return s;
    };
    const State k2 = rhs(r + c2 * h, comb({{a21, &k1}}));
    const State k3 = rhs(r + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(r + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(r + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(r + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(r + h, y5);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(ei) / (1e-10 * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])))));
    }
    if (!std::isfinite(err)) throw std::runtime_error("radial_shoot: integration blew up");
    if (err <= 1.0) {
      r = (R - r - h <= 1e-14 * R) ? R : r + h;
      y = y5;
      k1 = k7;
      if (keep) {
        out.r.push_back(r);
        out.u.push_back(y[0]);
        out.du.push_back(k7[0]);
      }
      if (y[0] < 0.0 && r < R && !keep) {
        // u keeps decreasing once the reaction is switched off; the sign is decided.
        out.end_value = y[0] - (R - r);
        out.crossed = true;
        return out;
      }
    }
    h *= std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
    if (h < 1e-15 * R) throw std::runtime_error("radial_shoot: step size underflow");
  }
  out.end_value = y[0];
  return out;
}

}  // namespace

RadialProfile radial_shoot(const ExponentSet& exp, double coeff_q, const Reaction& reaction, double R, int N_dim,
                           double tol) {
  if (!(R > 0.0)) throw std::invalid_argument("radial_shoot: R must be positive");
  if (N_dim < 1) throw std::invalid_argument("radial_shoot: N_dim must be >= 1");
  if (!(exp.p > 1.0 && exp.q > 1.0 && coeff_q >= 0.0)) throw std::invalid_argument("radial_shoot: bad exponents");
  auto end_at = [&](double u0) { return integrate_shot(u0, exp, coeff_q, reaction, R, N_dim, false).end_value; };

  int shots = 0;
  double lo = 1.0, hi = 1.0;
  double f = end_at(1.0);
  ++shots;
  for (int k = 0; f > 0.0; ++k, ++shots) {
    if (k > 300) throw std::runtime_error("radial_shoot: bracket not found (u(R) > 0 for all tried u0)");
    hi = lo;
    lo *= 0.5;
    f = end_at(lo);
  }
  if (hi == lo) {
    double g = f;
    for (int k = 0; g <= 0.0; ++k, ++shots) {
      if (k > 300) throw std::runtime_error("radial_shoot: bracket not found (u(R) < 0 for all tried u0)");
      lo = hi;
      hi *= 2.0;
      g = end_at(hi);
    }
  }
  double u0 = 0.5 * (lo + hi);
  for (int k = 0; k < 300; ++k, ++shots) {
    u0 = 0.5 * (lo + hi);
    const double v = end_at(u0);
    if (std::abs(v) <= tol || hi - lo <= 1e-15 * hi) break;
    (v > 0.0 ? hi : lo) = u0;
  }
  ShotResult shot = integrate_shot(u0, exp, coeff_q, reaction, R, N_dim, true);
  RadialProfile prof;
  prof.r_grid = std::move(shot.r);
  prof.values = std::move(shot.u);
  prof.slopes = std::move(shot.du);
  prof.N_dim = N_dim;
  prof.shots = shots + 1;
  return prof;
}

ComparisonReport comparison_test(const ScalarField& u1, const ScalarField& u2, const Reaction& f,
                                 const ExponentSet& exp, double coeff_q) {
  ComparisonReport rep;
  rep.hypothesis_ok = true;
  double prev = INFINITY;
  for (double s : hypothesis_grid()) {
    const double v = f(s) * std::pow(s, 1.0 - exp.q);
    if (v > prev * (1.0 + 1e-12) + 1e-300) {
      rep.hypothesis_ok = false;
      break;
    }
    prev = v;
  }
  rep.u1_subsolution = verify_weak_subsolution(u1, reaction_load(u1, f), exp, coeff_q).pass;
  rep.u2_supersolution = verify_weak_supersolution(u2, reaction_load(u2, f), exp, coeff_q).pass;
  rep.max_excess = -INFINITY;
  for (int i : u1.grid().interior_nodes()) rep.max_excess = std::max(rep.max_excess, u1.values[i] - u2.values[i]);
  rep.slack = 1e-8 * u2.sup_norm();
  rep.ordered = rep.max_excess <= rep.slack;
  rep.pass = rep.hypothesis_ok && rep.u1_subsolution && rep.u2_supersolution && rep.ordered;
  return rep;
}

namespace {

void require_positive(const ScalarField& u, const char* who) {
  for (int i : u.grid().interior_nodes())
    if (!(u.values[i] > 0.0)) throw std::domain_error(std::string(who) + ": nonpositive nodal value");
}

double barycentric(const Mesh& mesh, const Eigen::VectorXd& v, int e) {
  double s = 0.0;
  for (int a = 0; a < mesh.nodes_per_element(); ++a) s += v[mesh.element_node(e, a)];
  return s / mesh.nodes_per_element();
}

}  // namespace

PointwiseReport picone_pointwise_check(const ScalarField& u1, const ScalarField& u2, const ExponentSet& exp) {
  require_positive(u1, "picone");
  require_positive(u2, "picone");
  if (!(exp.q <= exp.p)) throw std::invalid_argument("picone: need q <= p");
  const Mesh& mesh = u1.grid();
  const double p = exp.p, q = exp.q;
  PointwiseReport rep;
  rep.max_violation = -INFINITY;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double a = barycentric(mesh, u1.values, e), b = barycentric(mesh, u2.values, e);
    const auto ga = element_gradient(mesh, u1.values, e);
    const auto gb = element_gradient(mesh, u2.values, e);
    const double na = ga.norm(), nb = gb.norm();
    const double t = b / a;
    const auto grad_ratio = (q * std::pow(t, q - 1.0) * gb - (q - 1.0) * std::pow(t, q) * ga).eval();
    const double lhs = std::pow(na, p - 2.0) * ga.dot(grad_ratio);
    const double rhs = q / p * std::pow(nb, p) + (p - q) / p * std::pow(na, p);
    const double v = (lhs - rhs) / std::max(1.0, std::pow(na, p) + std::pow(nb, p));
    ++rep.elements_tested;
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_element = e;
    }
  }
  return rep;
}

PointwiseReport lindqvist_term_check(const ScalarField& u1, const ScalarField& u2, double q) {
  if (!(q >= 2.0)) throw std::invalid_argument("lindqvist: need q >= 2");
  require_positive(u1, "lindqvist");
  require_positive(u2, "lindqvist");
  const Mesh& mesh = u1.grid();
  const double c = 1.0 / (std::pow(2.0, q - 1.0) - 1.0);
  PointwiseReport rep;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double a = barycentric(mesh, u1.values, e), b = barycentric(mesh, u2.values, e);
    if (!(a > b)) continue;
    const auto ga = element_gradient(mesh, u1.values, e);
    const auto gb = element_gradient(mesh, u2.values, e);
    const double na = ga.norm(), nb = gb.norm();
    const double ba = b / a, ab = a / b;
    const auto gw1 = ((1.0 + (q - 1.0) * std::pow(ba, q)) * ga - q * std::pow(ba, q - 1.0) * gb).eval();
    const auto gw2 = (q * std::pow(ab, q - 1.0) * ga - (1.0 + (q - 1.0) * std::pow(ab, q)) * gb).eval();
    const double lhs = std::pow(na, q - 2.0) * ga.dot(gw1) - std::pow(nb, q - 2.0) * gb.dot(gw2);
    const double rhs = c * std::pow((a * gb - b * ga).norm(), q) / (std::pow(a, q) + std::pow(b, q));
    const double v = (rhs - lhs) / std::max(1.0, std::pow(na, q) + std::pow(nb, q));
    if (rep.elements_tested++ == 0 || v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_element = e;
    }
  }
  return rep;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

ScalingReport scaling_sweep(const MeshPtr& mesh, const ExponentSet& exp, const std::vector<double>& lambdas,
                            const SolverConfig& cfg, double coeff_q) {
  if (lambdas.size() < 5) throw std::invalid_argument("scaling_sweep: need at least 5 lambda values");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 1.0)) throw std::invalid_argument("scaling_sweep: lambdas must be >= 1");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw std::invalid_argument("scaling_sweep: lambdas must increase");
  }
  if (lambdas.back() / lambdas.front() < 100.0) throw std::invalid_argument("scaling_sweep: need >= 2 decades");
  exp.require_maximal_path();

  ScalingReport rep;
  const double kappa = 1.0 / (exp.p - 1.0 - exp.sigma);
  rep.expected = kappa;

  std::vector<std::future<ScalarField>> jobs;
  for (double l : lambdas)
    jobs.push_back(std::async(std::launch::async, [&, l] {
      return solve_global_supersolution_descending(mesh, exp, l, cfg, nullptr, coeff_q);
    }));
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    ScalarField phi;
    try {
      phi = jobs[k].get();
    } catch (const std::exception& e) {
      if (rep.message.empty()) {
        std::ostringstream os;
        os << "solve failed at lambda=" << lambdas[k] << ": " << e.what();
        rep.message = os.str();
      }
      continue;
    }
    if (!rep.message.empty()) continue;
    const double l = lambdas[k];
    const double scale = std::pow(l, kappa);
    rep.lambdas.push_back(l);
    rep.sup_values.push_back(phi.sup_norm());
    rep.gamma_scales.push_back(std::pow(l, (exp.q - exp.p) / (exp.p - 1.0 - exp.sigma)));
    rep.linf_rescaled.push_back(phi.sup_norm() / scale);
    double rmin = INFINITY, rmax = 0.0;
    for (int i : mesh->interior_nodes()) {
      const double ratio = phi.values[i] / (scale * mesh->distance(i));
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    rep.ratio_min.push_back(rmin);
    rep.ratio_max.push_back(rmax);
    if (!rep.fields.empty()) {
      const ScalarField& prev = rep.fields.back();
      const double slack = 1e-10 * std::max(1.0, phi.sup_norm());
      for (int i : mesh->interior_nodes())
        if (prev.values[i] > phi.values[i] + slack) rep.monotone_in_lambda = false;
    }
    rep.fields.push_back(std::move(phi));
  }
  if (!rep.message.empty()) return rep;

  const std::size_t start = rep.lambdas.size() / 2;
  std::vector<double> lx, ly;
  for (std::size_t k = start; k < rep.lambdas.size(); ++k) {
    lx.push_back(std::log(rep.lambdas[k]));
    ly.push_back(std::log(rep.sup_values[k]));
  }
  rep.slope_fit = least_squares_slope(lx, ly);
  rep.complete = true;
  return rep;
}

std::pair<double, double> boundary_ratio_profile(const ScalarField& u, double band) {
  const Mesh& mesh = u.grid();
  if (!(band > 0.0 && band < 0.5 * mesh.inradius()))
    throw std::invalid_argument("boundary_ratio_profile: band must lie in (0, inradius/2)");
  double lo = INFINITY, hi = -INFINITY;
  for (int i : mesh.interior_nodes()) {
    if (mesh.distance(i) > band) continue;
    const double ratio = u.values[i] / mesh.distance(i);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  if (!(hi >= lo)) throw std::invalid_argument("boundary_ratio_profile: no interior node within the band");
  return {lo, hi};
}

}  // namespace pqlap
