#include "mbh/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace mbh {
namespace {

// log2 |x| without leaving the MPFR exponent range; -inf for zero.
double log2abs(const Real& x) {
  if (x == 0) return -INFINITY;
  long e = 0;
  double d = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
  return static_cast<double>(e) + std::log2(std::fabs(d));
}
double log2abs(const ComplexValue& z) { return std::max(log2abs(z.re), log2abs(z.im)); }

Real magnitude(const Real& x) { return abs(x); }
Real magnitude(const ComplexValue& z) { return abs(z); }

// Jacobi polynomial P_n^{(a,b)}(s) and its derivative.
std::pair<Real, Real> jacobi_eval(int n, const Real& a, const Real& b, const Real& s) {
  Real p0 = 1;
  if (n == 0) return {p0, Real(0)};
  Real p1 = (a + 1) + (a + b + 2) * (s - 1) / 2;
  for (int k = 2; k <= n; ++k) {
    Real c = 2 * k + a + b;
    Real lhs = 2 * k * (k + a + b) * (c - 2);
    Real rhs1 = (c - 1) * (c * (c - 2) * s + a * a - b * b);
    Real rhs2 = 2 * (k + a - 1) * (k + b - 1) * c;
    Real p2 = (rhs1 * p1 - rhs2 * p0) / lhs;
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  // p1 = P_n, p0 = P_{n-1}
  Real c = 2 * n + a + b;
  Real dp = (n * ((a - b) - c * s) * p1 + 2 * (n + a) * (n + b) * p0) / (c * (1 - s * s));
  return {p1, dp};
}

// Gauss-Jacobi rule on [-1, 1] for weight (1-s)^a (1+s)^b.
GaussRule gauss_jacobi_pm1(int order, double ad, double bd, const Real& a, const Real& b, int bits) {
  // Golub-Welsch in double for starting values.
  Eigen::VectorXd diag(order);
  Eigen::VectorXd off(std::max(order - 1, 0));
  for (int k = 0; k < order; ++k) {
    double c = 2.0 * k + ad + bd;
    diag(k) = k == 0 ? (bd - ad) / (ad + bd + 2.0) : (bd * bd - ad * ad) / (c * (c + 2.0));
    if (k + 1 < order) {
      double kk = k + 1;
      double ck = 2.0 * kk + ad + bd;
      off(k) = std::sqrt(4.0 * kk * (kk + ad) * (kk + bd) * (kk + ad + bd) /
                         (ck * ck * (ck + 1.0) * (ck - 1.0)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  Eigen::VectorXd start = solver.eigenvalues();

  GaussRule rule;
  PrecisionGuard guard(bits + 32);
  const Real eps = ldexp(Real(1), -(bits + 8));
  Real norm = tgamma(Real(order) + a + 1) * tgamma(Real(order) + b + 1) /
              (tgamma(Real(order) + a + b + 1) * tgamma(Real(order) + 1)) * pow(Real(2), a + b + 1);
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    Real s = start(i);
    Real dp;
    for (int it = 0; it < 200; ++it) {
      auto [p, d] = jacobi_eval(order, a, b, s);
      Real step = p / d;
      s -= step;
      if (abs(step) <= eps) break;
    }
    dp = jacobi_eval(order, a, b, s).second;
    rule.nodes[i] = s;
    rule.weights[i] = norm / ((1 - s * s) * dp * dp);
  }
  return rule;
}

}  // namespace

void PrecisionContext::validate() const {
  if (mantissa_bits < 64) throw DomainError("mantissa_bits must be at least 64");
  if (mantissa_bits > 8192) throw DomainError("mantissa_bits must be at most 8192");
  const double tol = tolerance();
  if (!(tol > 0.0) || std::log2(tol) < -mantissa_bits) throw DomainError("rel_tol below 2^-mantissa_bits");
  if (max_series_terms < 1 || quad_points_circle < 2 || quad_points_line < 2)
    throw DomainError("quadrature and series limits must be positive");
}

std::string to_decimal(const Real& x) {
  const int digits = static_cast<int>(x.precision()) + 2;
  return x.str(digits, std::ios_base::scientific);
}

const GaussRule& gauss_legendre(int order, int bits) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{order, bits}];
  if (!slot) {
    PrecisionGuard guard(bits + 32);
    slot = std::make_unique<GaussRule>(gauss_jacobi_pm1(order, 0.0, 0.0, Real(0), Real(0), bits));
  }
  return *slot;
}

GaussRule gauss_jacobi_unit(int order, const Real& alpha, int bits) {
  PrecisionGuard guard(bits + 32);
  Real a = 0;
  Real b = at_current_precision(alpha);
  GaussRule rule = gauss_jacobi_pm1(order, 0.0, alpha.convert_to<double>(), a, b, bits);
  Real scale = pow(Real(2), -(b + 1));
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = (rule.nodes[i] + 1) / 2;
    rule.weights[i] *= scale;
  }
  return rule;
}

ComplexValue quad_circle(const std::function<ComplexValue(const ComplexValue&)>& f, const Real& radius,
                         const PrecisionContext& ctx) {
  if (!(radius > 0)) throw DomainError("quad_circle: radius must be positive");
  PrecisionGuard guard(ctx.mantissa_bits);
  const Real r = at_current_precision(radius);
  const Real two_pi = 2 * pi();
  const Real tol = ctx.tolerance();

  long n = std::max(ctx.quad_points_circle, 2);
  ComplexValue sum(Real(0));
  Real abs_sum = 0;
  for (long k = 0; k < n; ++k) {
    ComplexValue v = f(r * expi(two_pi * k / n));
    abs_sum += abs(v);
    sum += v;
  }
  ComplexValue prev = sum / Real(n);
  while (2 * n <= kMaxQuadratureNodes) {
    for (long k = 1; k < 2 * n; k += 2) {
      ComplexValue v = f(r * expi(two_pi * k / (2 * n)));
      abs_sum += abs(v);
      sum += v;
    }
    n *= 2;
    ComplexValue cur = sum / Real(n);
    Real scale = max(abs(cur), abs_sum / n);
    if (abs(cur - prev) <= tol * scale) return cur;
    prev = cur;
  }
  throw NonConvergence("quad_circle: node cap reached without agreement");
}

std::vector<ComplexValue> quad_circle_arcs(const VectorCircleFn& f, std::size_t components, const Real& radius,
                                           std::vector<Real> breakpoints, const PrecisionContext& ctx) {
  if (!(radius > 0)) throw DomainError("quad_circle_arcs: radius must be positive");
  PrecisionGuard guard(ctx.mantissa_bits);
  const Real r = at_current_precision(radius);
  const Real p = pi();
  const Real tol = ctx.tolerance();
  for (auto& b : breakpoints) b = at_current_precision(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  if (breakpoints.empty()) breakpoints.push_back(-p);
  std::vector<std::pair<Real, Real>> arcs;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) arcs.emplace_back(breakpoints[i], breakpoints[i + 1]);
  arcs.emplace_back(breakpoints.back(), breakpoints.front() + 2 * p);

  std::vector<ComplexValue> total(components, ComplexValue(Real(0)));
  std::vector<ComplexValue> values(components);
  for (const auto& [lo, hi] : arcs) {
    const Real mid = (lo + hi) / 2;
    const Real half = (hi - lo) / 2;
    auto integrate = [&](int order, std::vector<Real>& l1) {
      const GaussRule& rule = gauss_legendre(order, ctx.mantissa_bits);
      std::vector<ComplexValue> acc(components, ComplexValue(Real(0)));
      l1.assign(components, Real(0));
      for (int i = 0; i < order; ++i) {
        Real phi = mid + half * rule.nodes[i];
        f(r * expi(phi), values);
        Real w = rule.weights[i] * half / (2 * p);
        for (std::size_t c = 0; c < components; ++c) {
          acc[c] += values[c] * w;
          l1[c] += abs(values[c]) * w;
        }
      }
      return acc;
    };
    int order = std::max(8, ctx.quad_points_circle / 4);
    std::vector<Real> l1;
    std::vector<ComplexValue> prev = integrate(order, l1);
    bool done = false;
    while (!done) {
      if (2L * order > 4096) throw NonConvergence("quad_circle_arcs: order cap reached");
      order *= 2;
      std::vector<ComplexValue> cur = integrate(order, l1);
      done = true;
      for (std::size_t c = 0; c < components && done; ++c) {
        Real scale = max(abs(cur[c]), l1[c]);
        if (abs(cur[c] - prev[c]) > tol * scale) done = false;
      }
      prev = std::move(cur);
    }
    for (std::size_t c = 0; c < components; ++c) total[c] += prev[c];
  }
  return total;
}

ComplexValue quad_circle_arcs(const std::function<ComplexValue(const ComplexValue&)>& f, const Real& radius,
                              std::vector<Real> breakpoints, const PrecisionContext& ctx) {
  auto vf = [&](const ComplexValue& z, std::vector<ComplexValue>& out) { out[0] = f(z); };
  return quad_circle_arcs(vf, 1, radius, std::move(breakpoints), ctx)[0];
}

namespace {

// Exp-sinh engine over s in (0, inf) for scalar type S. `eval(s, out)` returns
// integrand values; the Jacobian is applied here.
template <class S, class Eval>
std::vector<S> exp_sinh(const Eval& eval, std::size_t m, double alpha, const Real& decay_scale,
                        const PrecisionContext& ctx) {
  if (alpha <= -1.0) throw EndpointSingularity("quad_semiaxis: endpoint exponent must exceed -1");
  if (!(decay_scale > 0)) throw DomainError("quad_semiaxis: decay scale must be positive");
  const int bits = ctx.mantissa_bits + 16;
  PrecisionGuard guard(bits);
  const Real scale = at_current_precision(decay_scale);
  const Real half_pi = pi() / 2;
  const Real tol = ctx.tolerance();
  const double cutoff = -(bits + 10.0);

  std::vector<S> values(m);
  auto node = [&](const Real& t, std::vector<S>& terms) {
    Real e = half_pi * sinh(t);
    Real x = scale * exp(e);
    Real jac = x * half_pi * cosh(t);
    eval(x, values);
    for (std::size_t c = 0; c < m; ++c) terms[c] = values[c] * jac;
  };

  // Truncation window from a coarse scan: stop after two negligible nodes.
  std::vector<S> terms(m);
  std::vector<double> peak(m, -INFINITY);
  std::vector<std::pair<double, std::vector<S>>> coarse;
  const double step0 = 0.5;
  double t_lo = 0.0;
  double t_hi = 0.0;
  for (int dir : {+1, -1}) {
    int quiet = 0;
    for (int k = (dir > 0 ? 0 : 1); k < 200; ++k) {
      double t = dir * k * step0;
      node(Real(t), terms);
      coarse.emplace_back(t, terms);
      bool negligible = true;
      for (std::size_t c = 0; c < m; ++c) {
        double l = log2abs(terms[c]);
        peak[c] = std::max(peak[c], l);
        if (l > peak[c] + cutoff) negligible = false;
      }
      (dir > 0 ? t_hi : t_lo) = t;
      if (negligible && k > 2) {
        if (++quiet >= 2) break;
      } else {
        quiet = 0;
      }
    }
  }

  std::vector<S> sum(m, S(Real(0)));
  std::vector<Real> l1(m, Real(0));
  for (const auto& [t, tv] : coarse) {
    for (std::size_t c = 0; c < m; ++c) {
      sum[c] += tv[c];
      l1[c] += magnitude(tv[c]);
    }
  }
  Real h = step0;
  std::vector<S> prev(m);
  for (std::size_t c = 0; c < m; ++c) prev[c] = sum[c] * h;
  long count = static_cast<long>(coarse.size());
  while (count * 2 <= kMaxQuadratureNodes) {
    Real hn = h / 2;
    long kmin = static_cast<long>(std::floor(t_lo / hn.convert_to<double>()));
    long kmax = static_cast<long>(std::ceil(t_hi / hn.convert_to<double>()));
    for (long k = kmin; k <= kmax; ++k) {
      if (k % 2 == 0) continue;
      node(hn * k, terms);
      for (std::size_t c = 0; c < m; ++c) {
        sum[c] += terms[c];
        l1[c] += magnitude(terms[c]);
      }
      ++count;
    }
    h = hn;
    bool done = true;
    std::vector<S> cur(m);
    for (std::size_t c = 0; c < m; ++c) {
      cur[c] = sum[c] * h;
      // Integrals that cancel to nothing stop at the rounding floor.
      Real floor = l1[c] * h * ldexp(Real(1), -ctx.mantissa_bits);
      if (magnitude(cur[c] - prev[c]) > max(tol * magnitude(cur[c]), floor)) done = false;
    }
    prev = std::move(cur);
    if (done) return prev;
  }
  throw NonConvergence("quad_semiaxis: node cap reached without agreement");
}

}  // namespace

Real quad_semiaxis(const SemiAxisIntegrand& f, const Real& decay_scale, const PrecisionContext& ctx) {
  auto eval = [&](const Real& x, std::vector<Real>& out) { out[0] = f.f(x); };
  Real r = exp_sinh<Real>(eval, 1, f.alpha, decay_scale, ctx)[0];
  r.precision(digits10_for_bits(ctx.mantissa_bits));
  return r;
}

std::vector<Real> quad_semiaxis_many(const VectorSemiAxisFn& f, std::size_t components, double alpha,
                                     const Real& decay_scale, const PrecisionContext& ctx) {
  auto r = exp_sinh<Real>(f, components, alpha, decay_scale, ctx);
  for (auto& v : r) v.precision(digits10_for_bits(ctx.mantissa_bits));
  return r;
}

ComplexValue quad_ray(const RayFn& f, const Real& phi, double alpha, const Real& decay_scale,
                      const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.mantissa_bits + 16);
  const ComplexValue dir = expi(at_current_precision(phi));
  auto eval = [&](const Real& s, std::vector<ComplexValue>& out) { out[0] = f(dir * s) * dir; };
  return exp_sinh<ComplexValue>(eval, 1, alpha, decay_scale, ctx)[0];
}

}  // namespace mbh
