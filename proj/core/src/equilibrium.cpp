#include "mbh/equilibrium.hpp"

#include "mbh/errors.hpp"
#include "mbh/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mbh {
namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// x(t) = b sin(kPi t/2)^p with p = 1 + 1/theta, evaluated without cancellation
// near either end.
struct GradedMap {
  double b;
  double theta;
  double p;

  GradedMap(double b_, double theta_) : b(b_), theta(theta_), p(1.0 + 1.0 / theta_) {}

  static double log_sin_half(double t, double u) {
    if (t > 0.5) {
      const double s = std::sin(kPi * u / 4);
      return std::log1p(-2 * s * s);
    }
    return std::log(std::sin(kPi * t / 2));
  }
  double x(double t, double u) const { return b * std::exp(p * log_sin_half(t, u)); }
  double b_minus_x(double t, double u) const { return -b * std::expm1(p * log_sin_half(t, u)); }
  // b^theta - x(t)^theta
  double b_minus_x_theta(double t, double u) const {
    return -std::pow(b, theta) * std::expm1((theta + 1) * log_sin_half(t, u));
  }
  double dx_dt(double t, double u) const {
    if (t <= 0) return 0.0;
    return x(t, u) * p * (kPi / 2) * std::cos(kPi * t / 2) / std::sin(kPi * t / 2);
  }
  // Preimage as (t, 1 - t).
  std::pair<double, double> t_of(double xv) const {
    if (xv <= 0) return {0.0, 1.0};
    if (xv >= b) return {1.0, 0.0};
    const double e = theta / (theta + 1);
    const double r = std::exp(e * std::log(xv / b));
    if (r < 0.7) {
      const double t = 2 / kPi * std::asin(r);
      return {t, 1 - t};
    }
    const double one_minus_r = -std::expm1(e * std::log1p((xv - b) / b));
    const double u = 4 / kPi * std::asin(std::sqrt(one_minus_r / 2));
    return {1 - u, u};
  }
};

// Shifted Legendre values P_k(2t - 1), k < count.
void legendre_values(double s, std::size_t count, double* out) {
  if (count == 0) return;
  out[0] = 1.0;
  if (count == 1) return;
  out[1] = s;
  for (std::size_t k = 1; k + 1 < count; ++k)
    out[k + 1] = ((2.0 * k + 1) * s * out[k] - k * out[k - 1]) / (k + 1.0);
}

double legendre_sum(const std::vector<double>& a, double s) {
  // Clenshaw for sum a_k P_k(s).
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) {
    const double alpha = (2.0 * k + 1) / (k + 1.0) * s;
    const double beta = -(k + 1.0) / (k + 2.0);
    const double b0 = a[k] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

// \int_0^1 log|tx - t| P_k(2t - 1) dt. At tx = 0 or 1 this is the moment of
// log t or log(1 - t).
std::vector<double> log_moments(double tx, double ux, std::size_t count) {
  std::vector<double> m(count);
  if (tx <= 0 || ux <= 0) {
    for (std::size_t k = 0; k < count; ++k) {
      double v = k == 0 ? -1.0 : (k % 2 ? 1.0 : -1.0) / (static_cast<double>(k) * (k + 1.0));
      if (ux <= 0 && k % 2) v = -v;
      m[k] = v;
    }
    return m;
  }
  // In s = 2t - 1: \int_{-1}^1 log|s0 - s| P_n(s) ds = 2 (Q_{n+1} - Q_{n-1})/(2n + 1).
  const double s = tx - ux;
  std::vector<double> q(count + 2);
  q[0] = 0.5 * std::log(tx / ux);
  q[1] = s * q[0] - 1;
  for (std::size_t k = 1; k + 1 < q.size(); ++k) q[k + 1] = ((2.0 * k + 1) * s * q[k] - k * q[k - 1]) / (k + 1.0);
  const double m0 = 2 * tx * std::log(2 * tx) + 2 * ux * std::log(2 * ux) - 2;
  m[0] = 0.5 * m0 - std::log(2.0);
  for (std::size_t k = 1; k < count; ++k) m[k] = (q[k + 1] - q[k - 1]) / (2.0 * k + 1);
  return m;
}

struct NodeRule {
  std::vector<double> t, u, w;
};

NodeRule make_rule(int order) {
  const GaussRule& g = gauss_legendre(order, 64);
  NodeRule r;
  for (int i = 0; i < order; ++i) {
    const double s = g.nodes[i].convert_to<double>();
    // 1 - t from the node directly keeps precision near t = 1.
    r.t.push_back((1 + s) / 2);
    r.u.push_back((1 - s) / 2);
    r.w.push_back(g.weights[i].convert_to<double>() / 2);
  }
  return r;
}

// Both log kernels at a point x in [0, b], split as
//   log|x - X(t)|           = mult_plain log|tx - t| + rem_plain(t)
//   log|x^th - X(t)^th|     = mult_tilde log|tx - t| + rem_tilde(t)
struct KernelSplit {
  double mult_plain = 1.0;
  double mult_tilde = 1.0;
  std::vector<double> moments;
  std::vector<double> rem_plain;
  std::vector<double> rem_tilde;
};

template <class Rule>
KernelSplit split_kernels(const GradedMap& map, const Rule& rule, double x, std::size_t modes) {
  KernelSplit k;
  const std::size_t n = rule.t.size();
  k.rem_plain.resize(n);
  k.rem_tilde.resize(n);
  const double theta = map.theta;
  const double log_b = std::log(map.b);
  if (x <= 0) {
    k.mult_plain = map.p;
    k.mult_tilde = theta + 1;
    k.moments = log_moments(0.0, 1.0, modes);
    for (std::size_t g = 0; g < n; ++g) {
      const double r = GradedMap::log_sin_half(rule.t[g], rule.u[g]) - std::log(rule.t[g]);
      k.rem_plain[g] = log_b + map.p * r;
      k.rem_tilde[g] = theta * log_b + (theta + 1) * r;
    }
    return k;
  }
  if (x >= map.b) {
    k.mult_plain = k.mult_tilde = 2.0;
    k.moments = log_moments(1.0, 0.0, modes);
    for (std::size_t g = 0; g < n; ++g) {
      const double lu = 2 * std::log(rule.u[g]);
      k.rem_plain[g] = std::log(map.b_minus_x(rule.t[g], rule.u[g])) - lu;
      k.rem_tilde[g] = std::log(map.b_minus_x_theta(rule.t[g], rule.u[g])) - lu;
    }
    return k;
  }
  const auto [tx, ux] = map.t_of(x);
  k.moments = log_moments(tx, ux, modes);
  const bool upper = x >= map.b / 2;
  const double bmx = map.b - x;
  const double bt = std::pow(map.b, theta);
  const double xt = std::pow(x, theta);
  const double bmx_theta = -bt * std::expm1(theta * std::log1p((x - map.b) / map.b));
  for (std::size_t g = 0; g < n; ++g) {
    const double t = rule.t[g];
    const double u = rule.u[g];
    const double dt = (tx > 0.5 && t > 0.5) ? (u - ux) : (tx - t);
    const double dp = upper ? map.b_minus_x(t, u) - bmx : x - map.x(t, u);
    const double dq = upper ? map.b_minus_x_theta(t, u) - bmx_theta : xt - bt * std::exp((theta + 1) * GradedMap::log_sin_half(t, u));
    const double ldt = std::log(std::fabs(dt));
    k.rem_plain[g] = std::log(std::fabs(dp)) - ldt;
    k.rem_tilde[g] = std::log(std::fabs(dq)) - ldt;
  }
  return k;
}

struct Collocation {
  std::vector<double> a;
  double ell = 0.0;
  std::vector<double> nodes_t, nodes_u;
};

class Solver {
 public:
  Solver(const Potential& v, double theta, int modes)
      : v_(v), theta_(theta), modes_(static_cast<std::size_t>(modes)), rule_(make_rule(std::max(400, 8 * modes))) {
    const std::size_t n = rule_.t.size();
    basis_.resize(n * modes_);
    for (std::size_t g = 0; g < n; ++g) legendre_values(rule_.t[g] - rule_.u[g], modes_, &basis_[g * modes_]);
    for (std::size_t i = 0; i < modes_; ++i) {
      const double angle = kPi * (i + 0.5) / (2.0 * modes_);
      t_.push_back(std::sin(angle) * std::sin(angle));
      u_.push_back(std::cos(angle) * std::cos(angle));
    }
  }

  const NodeRule& rule() const { return rule_; }

  Collocation solve(double b) const {
    const GradedMap map(b, theta_);
    const std::size_t m = modes_;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = map.x(t_[i], u_[i]);
      const KernelSplit k = split_kernels(map, rule_, x, m);
      for (std::size_t j = 0; j < m; ++j) a(i, j) = (k.mult_plain + k.mult_tilde) * k.moments[j];
      for (std::size_t g = 0; g < rule_.t.size(); ++g) {
        const double r = rule_.w[g] * (k.rem_plain[g] + k.rem_tilde[g]);
        const double* row = &basis_[g * m];
        for (std::size_t j = 0; j < m; ++j) a(i, j) += r * row[j];
      }
      a(i, m) = -1.0;
      rhs(i) = v_.value(x);
    }
    a(m, 0) = 1.0;  // mass
    rhs(m) = 1.0;
    const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
    Collocation c;
    c.a.assign(sol.data(), sol.data() + m);
    c.ell = sol(m);
    c.nodes_t = t_;
    c.nodes_u = u_;
    return c;
  }

  // nu(1): positive when b is too small (inverse square root at b), negative when too large.
  double edge(double b) const {
    const Collocation c = solve(b);
    return std::accumulate(c.a.begin(), c.a.end(), 0.0);
  }

 private:
  const Potential& v_;
  double theta_;
  std::size_t modes_;
  NodeRule rule_;
  std::vector<double> basis_;
  std::vector<double> t_, u_;
};

double find_support_edge(const Solver& solver) {
  double lo = 1.0;
  double flo = solver.edge(lo);
  double hi = lo;
  double fhi = flo;
  for (int i = 0; i < 80 && (flo > 0) == (fhi > 0); ++i) {
    if (fhi > 0) {
      lo = hi;
      flo = fhi;
      hi *= 2;
      fhi = solver.edge(hi);
    } else {
      hi = lo;
      fhi = flo;
      lo /= 2;
      flo = solver.edge(lo);
    }
  }
  if ((flo > 0) == (fhi > 0)) throw NonConvergence("solve_equilibrium: could not bracket the support edge");
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  std::uintmax_t iters = 200;
  auto root = boost::math::tools::toms748_solve([&](double b) { return solver.edge(b); }, lo, hi, flo, fhi,
                                                boost::math::tools::eps_tolerance<double>(50), iters);
  return (root.first + root.second) / 2;
}

// Least-squares intercept of y against the basis columns evaluated at xs.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y) {
  return basis.colPivHouseholderQr().solve(y);
}

double integrate_unit(const std::function<double(double)>& f) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 14, 1e-11, &err);
}

}  // namespace

double EquilibriumData::x_of_t(double t) const { return GradedMap(b, theta).x(t, 1 - t); }

double EquilibriumData::t_of_x(double x) const { return GradedMap(b, theta).t_of(x).first; }

double EquilibriumData::dx_dt(double t) const { return GradedMap(b, theta).dx_dt(t, 1 - t); }

double EquilibriumData::nu(double t) const { return legendre_sum(nu_legendre, 2 * t - 1); }

double EquilibriumData::density(double x) const {
  if (!(x > 0 && x < b)) return 0.0;
  const GradedMap map(b, theta);
  const auto [t, u] = map.t_of(x);
  return legendre_sum(nu_legendre, t - u) / map.dx_dt(t, u);
}

double EquilibriumData::mass_above(double x) const {
  if (x <= 0) return 1.0;
  if (x >= b) return 0.0;
  const auto [t, u] = GradedMap(b, theta).t_of(x);
  const double s = t - u;
  std::vector<double> p(nu_legendre.size() + 1);
  legendre_values(s, p.size(), p.data());
  // \int_t^1 P_k(2t' - 1) dt' = -(P_{k+1}(s) - P_{k-1}(s)) / (2 (2k + 1)), k >= 1.
  double acc = nu_legendre.empty() ? 0.0 : nu_legendre[0] * u;
  for (std::size_t k = 1; k < nu_legendre.size(); ++k)
    acc -= nu_legendre[k] * (p[k + 1] - p[k - 1]) / (2 * (2.0 * k + 1));
  return acc;
}

std::pair<double, double> EquilibriumData::log_potentials(double x) const {
  if (x < 0) throw DomainError("log_potentials: x must be non-negative");
  const GradedMap map(b, theta);
  if (x > b) {
    const double bt = std::pow(b, theta);
    const double gap = x - b;
    const double gap_theta = std::pow(x, theta) - bt;
    auto w = [&](double t) { return nu(t); };
    const double plain = integrate_unit([&](double t) { return std::log(gap + map.b_minus_x(t, 1 - t)) * w(t); });
    const double tilde =
        integrate_unit([&](double t) { return std::log(gap_theta + map.b_minus_x_theta(t, 1 - t)) * w(t); });
    return {plain, tilde};
  }
  const KernelSplit k = split_kernels(map, *rule, x, nu_legendre.size());
  double sing = 0.0;
  for (std::size_t j = 0; j < nu_legendre.size(); ++j) sing += nu_legendre[j] * k.moments[j];
  double plain = k.mult_plain * sing;
  double tilde = k.mult_tilde * sing;
  for (std::size_t g = 0; g < rule->t.size(); ++g) {
    plain += rule->w[g] * k.rem_plain[g] * rule->nu[g];
    tilde += rule->w[g] * k.rem_tilde[g] * rule->nu[g];
  }
  return {plain, tilde};
}

double EquilibriumData::el_residual(double x) const {
  const auto [plain, tilde] = log_potentials(x);
  return plain + tilde - potential.value(x) - lagrange_ell;
}

EquilibriumData solve_equilibrium(const Potential& v, double theta, int grid_size) {
  if (!(theta > 0) || !std::isfinite(theta)) throw DomainError("solve_equilibrium: theta must be positive");
  if (grid_size < 8 || grid_size > 512) throw DomainError("solve_equilibrium: grid_size must be in [8, 512]");
  if (!v.has_log_growth()) throw DomainError("solve_equilibrium: V does not grow faster than log x");
  if (!check_one_cut_sufficient(v, 1e4)) throw NotOneCut("solve_equilibrium: x V'' + V' > 0 fails");

  const Solver solver(v, theta, grid_size);
  const double b = find_support_edge(solver);
  const Collocation col = solver.solve(b);

  EquilibriumData eq;
  eq.theta = theta;
  eq.potential = v;
  eq.b = b;
  eq.nu_legendre = col.a;
  {
    auto rule = std::make_shared<EquilibriumData::Rule>();
    rule->t = solver.rule().t;
    rule->u = solver.rule().u;
    rule->w = solver.rule().w;
    for (double t : rule->t) rule->nu.push_back(legendre_sum(col.a, 2 * t - 1));
    eq.rule = std::move(rule);
  }
  const GradedMap map(b, theta);
  for (std::size_t i = 0; i < col.nodes_t.size(); ++i) {
    const double t = col.nodes_t[i];
    const double u = col.nodes_u[i];
    eq.grid.push_back(map.x(t, u));
    eq.psi.push_back(legendre_sum(col.a, t - u) / map.dx_dt(t, u));
  }
  eq.grid.push_back(b);
  eq.psi.push_back(0.0);

  // Dips are judged on the profile with both edge behaviours divided out.
  std::vector<double> profile;
  for (std::size_t i = 0; i + 1 < eq.psi.size(); ++i)
    profile.push_back(eq.psi[i] * std::pow(eq.grid[i], 1 / (theta + 1)) / std::sqrt(1 - eq.grid[i] / b));
  const double peak = *std::max_element(profile.begin(), profile.end());
  for (double h : profile)
    if (!(h > 1e-8 * peak)) throw NotOneCut("solve_equilibrium: density vanishes inside the support");

  // Hard edge: log-slope and d1 on x in [1e-4 b, 1e-2 b].
  constexpr int kFit = 40;
  const double edge = 1.0 / (theta + 1);
  {
    Eigen::MatrixXd slope_basis(kFit, 2);
    Eigen::VectorXd log_psi(kFit);
    Eigen::MatrixXd d1_basis(kFit, 3);
    Eigen::VectorXd scaled(kFit);
    for (int i = 0; i < kFit; ++i) {
      const double x = b * std::pow(10.0, -4.0 + 2.0 * i / (kFit - 1));
      const double d = eq.density(x);
      if (!(d > 0)) throw FitFailure("solve_equilibrium: density not positive in the hard-edge window");
      slope_basis(i, 0) = 1.0;
      slope_basis(i, 1) = std::log(x);
      log_psi(i) = std::log(d);
      d1_basis(i, 0) = 1.0;
      d1_basis(i, 1) = std::pow(x, theta * edge);
      d1_basis(i, 2) = x;
      scaled(i) = d * std::pow(x, edge);
    }
    eq.edge_exponent = least_squares(slope_basis, log_psi)(1);
    if (std::fabs(eq.edge_exponent + edge) > 0.1 * edge)
      throw FitFailure("solve_equilibrium: hard-edge exponent fit is off by more than 10%");
    eq.d1 = least_squares(d1_basis, scaled)(0);
  }
  {
    Eigen::MatrixXd basis(kFit, 2);
    Eigen::VectorXd scaled(kFit);
    for (int i = 0; i < kFit; ++i) {
      const double gap = b * std::pow(10.0, -4.0 + 2.0 * i / (kFit - 1));
      basis(i, 0) = 1.0;
      basis(i, 1) = gap;
      scaled(i) = eq.density(b - gap) / std::sqrt(gap);
    }
    eq.d2 = least_squares(basis, scaled)(0);
  }

  double ell = 0.0;
  for (std::size_t i = 0; i + 1 < eq.grid.size(); ++i) {
    const auto [plain, tilde] = eq.log_potentials(eq.grid[i]);
    ell += plain + tilde - v.value(eq.grid[i]);
  }
  eq.lagrange_ell = ell / static_cast<double>(eq.grid.size() - 1);

  const auto [g0, gt0] = eq.log_potentials(0.0);
  eq.g0_re = g0;
  eq.gtilde0_re = gt0;
  eq.c = b * theta * std::pow(1 + theta, -1 - 1 / theta);
  eq.rho = eq.d1 * kPi / (theta * std::sin(kPi / (1 + theta)));
  eq.varrho = (theta + 1) * eq.rho;
  eq.m_theta = std::min(1 + 1 / theta, 2.0);
  return eq;
}

std::complex<double> g_eval(const EquilibriumData& eq, std::complex<double> z, Side side) {
  const GradedMap map(eq.b, eq.theta);
  auto nu = [&](double t) { return eq.nu(t); };
  if (z.imag() == 0 && z.real() <= eq.b) {
    if (side == Side::none) throw BranchCutError("g: z on the cut (-inf, b]");
    const double sign = side == Side::plus ? 1.0 : -1.0;
    const double x = z.real();
    if (x >= 0) return {eq.log_potentials(x).first, sign * kPi * eq.mass_above(x)};
    const double re = integrate_unit([&](double t) { return std::log(-x + map.x(t, 1 - t)) * nu(t); });
    return {re, sign * kPi};
  }
  const double re = integrate_unit([&](double t) { return std::log(std::abs(z - map.x(t, 1 - t))) * nu(t); });
  const double im = integrate_unit([&](double t) { return std::arg(z - map.x(t, 1 - t)) * nu(t); });
  return {re, im};
}

std::complex<double> gtilde_eval_polar(const EquilibriumData& eq, double r, double arg, Side side) {
  const double theta = eq.theta;
  const double turn = theta * arg;
  if (!(r > 0)) throw BranchCutError("g~: z = 0 lies on the cut");
  if (std::fabs(turn) > kPi * (1 + 1e-14)) throw BranchCutError("g~: arg z outside |arg z| <= kPi/theta");
  const GradedMap map(eq.b, theta);
  auto nu = [&](double t) { return eq.nu(t); };
  auto xt = [&](double t) { return std::pow(map.b, theta) * std::exp((theta + 1) * GradedMap::log_sin_half(t, 1 - t)); };
  const double rt = std::pow(r, theta);
  if (arg == 0 && r <= eq.b) {
    if (side == Side::none) throw BranchCutError("g~: z on the cut [0, b]");
    const double sign = side == Side::plus ? 1.0 : -1.0;
    return {eq.log_potentials(r).second, sign * kPi * eq.mass_above(r)};
  }
  if (std::fabs(turn) >= kPi * (1 - 1e-14)) {
    // z^theta on the negative axis, reached from inside the sheet.
    const double re = integrate_unit([&](double t) { return std::log(rt + xt(t)) * nu(t); });
    return {re, std::copysign(kPi, arg)};
  }
  const cplx w = std::polar(rt, turn);
  const double re = integrate_unit([&](double t) { return std::log(std::abs(w - xt(t))) * nu(t); });
  const double im = integrate_unit([&](double t) { return std::arg(w - xt(t)) * nu(t); });
  return {re, im};
}

std::complex<double> gtilde_eval(const EquilibriumData& eq, std::complex<double> z, Side side) {
  return gtilde_eval_polar(eq, std::abs(z), std::arg(z), side);
}

std::complex<double> phi_eval(const EquilibriumData& eq, std::complex<double> z, Side side) {
  return g_eval(eq, z, side) + gtilde_eval(eq, z, side) - eq.potential.value(z) - eq.lagrange_ell;
}

std::complex<double> jc_map(std::complex<double> s, double c, double theta) {
  if (s == std::complex<double>(-1.0, 0.0)) return 0.0;
  if (s.imag() == 0 && s.real() >= -1 && s.real() <= 0) throw CutError("J_c: s on [-1, 0]");
  return c * (s + 1.0) * std::pow((s + 1.0) / s, 1.0 / theta);
}

SimplexEquilibrium minimize_energy_on_simplex(const Potential& v, double theta, double xmax, int cells,
                                              int iterations) {
  if (cells < 4) throw DomainError("minimize_energy_on_simplex: need at least 4 cells");
  const int n = cells;
  SimplexEquilibrium out;
  std::vector<double> edges(n + 1);
  for (int j = 0; j <= n; ++j) edges[j] = xmax * std::pow(static_cast<double>(j) / n, (theta + 1) / theta);
  Eigen::VectorXd mid(n), width(n), field(n);
  for (int j = 0; j < n; ++j) {
    mid(j) = (edges[j] + edges[j + 1]) / 2;
    width(j) = edges[j + 1] - edges[j];
    field(j) = v.value(mid(j));
  }
  // Kernel of the energy; the diagonal is the self-energy of a uniform cell.
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    const double mi = mid(i);
    const double mti = std::pow(mi, theta);
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        const double self = std::log(width(i)) - 1.5;
        k(i, i) = -2 * self - std::log(theta * std::pow(mi, theta - 1));
      } else {
        k(i, j) = -std::log(std::fabs(mi - mid(j))) - std::log(std::fabs(mti - std::pow(mid(j), theta)));
      }
    }
  }
  // Lipschitz constant by power iteration.
  Eigen::VectorXd probe = Eigen::VectorXd::Ones(n).normalized();
  double lip = 1.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd next = k * probe;
    lip = next.norm();
    probe = next / lip;
  }
  auto project = [n](Eigen::VectorXd y) {
    std::vector<double> s(y.data(), y.data() + n);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0;
    double tau = 0.0;
    for (int i = 0; i < n; ++i) {
      cum += s[i];
      const double cand = (cum - 1.0) / (i + 1);
      if (s[i] - cand > 0) tau = cand;
    }
    for (int i = 0; i < n; ++i) y(i) = std::max(y(i) - tau, 0.0);
    return y;
  };
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd y = w;
  double momentum = 1.0;
  int it = 0;
  for (; it < iterations; ++it) {
    Eigen::VectorXd next = project(y - (k * y + field) / lip);
    const double step = (next - w).lpNorm<Eigen::Infinity>();
    const double m_next = (1 + std::sqrt(1 + 4 * momentum * momentum)) / 2;
    y = next + ((momentum - 1) / m_next) * (next - w);
    w = std::move(next);
    momentum = m_next;
    if (step < 1e-15) break;
  }
  const Eigen::VectorXd grad = k * w + field;
  out.iterations = it;
  out.energy = 0.5 * w.dot(k * w) + w.dot(field);
  out.lagrange_ell = -w.dot(grad);
  const double top = w.maxCoeff();
  int last = 0;
  for (int j = 0; j < n; ++j)
    if (w(j) > 1e-10 * top) last = j;
  out.b = edges[last + 1];
  out.nodes.assign(mid.data(), mid.data() + n);
  out.widths.assign(width.data(), width.data() + n);
  out.weights.assign(w.data(), w.data() + n);
  return out;
}

}  // namespace mbh
