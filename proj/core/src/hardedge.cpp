#include "mbh/hardedge.hpp"

#include "mbh/errors.hpp"
#include "mbh/gamma.hpp"
#include "mbh/quadrature.hpp"
#include "mbh/wright.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mbh {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_integer(const Real& x) { return x == round(x); }

// log2 |(-x)^i / (i! Gamma(a + i s))| for i = 0, 1, ... until the terms fall
// below 2^-drop of the peak; returns the terms' count and peak.
struct SeriesExtent {
  int count = 0;
  double peak = -INFINITY;
};
SeriesExtent series_extent(double log2x, double a, double s, double drop) {
  SeriesExtent e;
  for (int i = 0; i < 100000; ++i) {
    const double arg = a + i * s;
    const double l = i * log2x - (std::lgamma(i + 1.0) + std::lgamma(arg)) / std::numbers::ln2;
    e.peak = std::max(e.peak, l);
    e.count = i + 1;
    if (i > 2 && l < e.peak - drop && l < -drop) break;
  }
  return e;
}

std::vector<Real> series_terms(const Real& x, const Real& a, const Real& s, int count) {
  std::vector<Real> t(static_cast<std::size_t>(count));
  Real power = 1;
  Real inv_fact = 1;
  for (int i = 0; i < count; ++i) {
    if (i > 0) {
      power *= -x;
      inv_fact /= i;
    }
    t[i] = power * inv_fact * rgamma(a + s * i);
  }
  return t;
}

double to_d(const Real& x) { return x.convert_to<double>(); }

ComplexValue widen(const ComplexValue& z) {
  return {mbh::at_current_precision(z.re), mbh::at_current_precision(z.im)};
}

Real evaluate_with_budget(const std::vector<Real>& coeffs, const ComplexValue& z, ComplexValue& value) {
  value = ComplexValue(Real(0));
  Real bound = 0;
  const Real r = abs(z);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    value = value * z + ComplexValue(*it);
    bound = bound * r + abs(*it);
  }
  return bound;
}

// Escalates the precision of the degree-n system until evaluating the
// polynomials at the scaled points keeps 64 bits beyond the normalisation.
template <class Body>
void with_escalation(const Experiment& ex, int n, Body body) {
  int bits = ex.ctx.mantissa_bits;
  for (;;) {
    BiorthogonalSystem sys = ex.system(n, bits);
    try {
      body(sys);
      return;
    } catch (const PrecisionLoss&) {
      if (sys.mantissa_bits >= 8192) throw;
      bits = 2 * sys.mantissa_bits;
    }
  }
}

void check_budget(const Real& bound, const Real& scale, int bits) {
  if (bound * ldexp(Real(1), -bits) > scale * ldexp(Real(1), -64))
    throw PrecisionLoss("cancellation in polynomial evaluation exceeds the precision budget");
}

ConvergenceReport start_report(const Experiment& ex, std::string target, const std::vector<int>& n_list) {
  if (n_list.empty()) throw DomainError("n_list must not be empty");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw DomainError("n_list must be strictly increasing");
  if (n_list.front() < 1) throw DomainError("n must be positive");
  ConvergenceReport r;
  r.target = std::move(target);
  r.constants = edge_constants(ex.eq);
  return r;
}

void finish_report(ConvergenceReport& r) { r.fitted_rate = fit_rate(r.n_values, r.errors); }

Real scaled_length(const EdgeConstants& k, const Real& theta, int n) {
  return pow(Real(k.rho) * n, 1 + 1 / theta);
}

}  // namespace

Real limit_kernel_series(const Real& x, const Real& y, const Real& alpha, const Real& theta,
                         const PrecisionContext& ctx) {
  if (x < 0 || y < 0) throw DomainError("limit kernel needs x, y >= 0");
  if (!(alpha > -1) || !(theta > 0)) throw DomainError("limit kernel needs alpha > -1 and theta > 0");
  const double th = to_d(theta);
  const double al = to_d(alpha);
  const double drop = ctx.mantissa_bits + 16.0;
  const double lx = x > 0 ? std::log2(to_d(x)) : -1e300;
  const double ly = y > 0 ? th * std::log2(to_d(y)) : -1e300;
  const SeriesExtent ex = series_extent(lx, (al + 1) / th, 1 / th, drop);
  const SeriesExtent ey = series_extent(ly, al + 1, th, drop);
  // Alternating terms peak far above the sum for large arguments.
  const int guard = ctx.mantissa_bits + 32 + static_cast<int>(std::max(0.0, ex.peak + ey.peak));
  PrecisionGuard g(guard);
  const Real xa = at_current_precision(x);
  const Real ya = at_current_precision(y);
  const Real th_r = at_current_precision(theta);
  const Real al_r = at_current_precision(alpha);
  const auto a = series_terms(xa, (al_r + 1) / th_r, 1 / th_r, ex.count);
  const auto b = series_terms(pow(ya, th_r), al_r + 1, th_r, ey.count);
  Real sum = 0;
  for (int i = 0; i < ex.count; ++i) {
    Real row = 0;
    for (int j = 0; j < ey.count; ++j) row += b[j] / (al_r + 1 + i + th_r * j);
    sum += a[i] * row;
  }
  Real out = th_r * sum;
  out.precision(digits10_for_bits(ctx.mantissa_bits));
  return out;
}

Real limit_kernel(const Real& x, const Real& y, const Real& alpha, const Real& theta, const PrecisionContext& ctx) {
  if (!is_integer(theta)) return limit_kernel_series(x, y, alpha, theta, ctx);
  if (x < 0 || y < 0) throw DomainError("limit kernel needs x, y >= 0");
  if (!(alpha > -1) || !(theta > 0)) throw DomainError("limit kernel needs alpha > -1 and theta > 0");
  const int bits = ctx.mantissa_bits + 16;
  PrecisionGuard g(bits);
  const Real th = at_current_precision(theta);
  const Real al = at_current_precision(alpha);
  PrecisionContext inner = ctx;
  inner.mantissa_bits = bits;
  WrightBessel first({(al + 1) / th, 1 / th}, inner);
  WrightBessel second({al + 1, th}, inner);
  const Real tol = 10 * ctx.tolerance();
  Real prev = 0;
  for (int order = 16; order <= 1024; order *= 2) {
    const GaussRule rule = gauss_jacobi_unit(order, al, bits);
    Real sum = 0;
    for (int i = 0; i < order; ++i) {
      const Real& u = rule.nodes[i];
      sum += rule.weights[i] * first(ComplexValue(x * u)).re * second(ComplexValue(pow(y * u, th))).re;
    }
    sum *= th;
    if (order > 16 && abs(sum - prev) <= tol * max(abs(sum), Real(1e-30))) {
      sum.precision(digits10_for_bits(ctx.mantissa_bits));
      return sum;
    }
    prev = sum;
  }
  throw NonConvergence("limit kernel: Gauss-Jacobi order cap reached");
}

Real k_product(const Real& x, const Real& y, const Real& alpha, const Real& theta, const PrecisionContext& ctx) {
  if (x < 0 || y < 0) throw DomainError("k_product needs x, y >= 0");
  PrecisionGuard g(ctx.mantissa_bits + 16);
  const Real th = at_current_precision(theta);
  const Real al = at_current_precision(alpha);
  const ComplexValue first = wright_bessel({(al + 1) / th, 1 / th}, ComplexValue(th * x), ctx);
  const ComplexValue second = wright_bessel({al + 1, th}, ComplexValue(pow(th * y, th)), ctx);
  Real out = pow(th, al) * first.re * second.re;
  out.precision(digits10_for_bits(ctx.mantissa_bits));
  return out;
}

WeightParams Experiment::weight(int n) const {
  WeightParams w;
  w.theta = theta;
  w.alpha = alpha;
  w.n = n;
  w.potential = eq.potential;
  return w;
}

BiorthogonalSystem Experiment::system(int n, int bits) const {
  PrecisionContext c = ctx;
  c.mantissa_bits = bits;
  return systems ? systems(weight(n), n, c) : build_system_auto(weight(n), n, c);
}

EdgeConstants edge_constants(const EquilibriumData& eq) {
  return {eq.rho, eq.c, eq.lagrange_ell, eq.g0_re, eq.gtilde0_re, eq.m_theta};
}

Real scale_constant_p(const EdgeConstants& k, const Real& alpha, const Real& theta, int n) {
  const Real two_pi = 2 * pi();
  return sqrt(two_pi) * pow(Real(k.c), (2 * (alpha + 1) - theta) / (2 * (theta + 1))) *
         pow(Real(k.rho) * n, (alpha + 1) / theta - Real(0.5)) * exp(Real(n) * Real(k.g0_re));
}

Real scale_constant_q(const EdgeConstants& k, const Real& alpha, const Real& theta, int n) {
  const Real two_pi = 2 * pi();
  return sqrt(two_pi) * pow(Real(k.c), (alpha + Real(0.5)) / (1 + 1 / theta)) *
         pow(theta * Real(k.rho) * n, alpha + Real(0.5)) * exp(Real(n) * Real(k.gtilde0_re));
}

Real kappa_prediction(const EdgeConstants& k, const Real& alpha, const Real& theta, int n) {
  return 2 * pi() / sqrt(theta) * pow(Real(k.c), alpha + 1) * exp(Real(n) * Real(k.ell));
}

bool ConvergenceReport::strictly_decreasing(std::size_t burn_in) const {
  for (std::size_t i = burn_in + 1; i < errors.size(); ++i)
    if (!(errors[i] < errors[i - 1])) return false;
  return true;
}

bool ConvergenceReport::rate_within(double tol) const {
  return std::fabs(fitted_rate - predicted_rate) <= tol * std::fabs(predicted_rate);
}

double fit_rate(const std::vector<int>& n_values, const std::vector<double>& errors) {
  const std::size_t size = std::min(n_values.size(), errors.size());
  if (size < 2) return kNaN;
  const std::size_t used = std::max<std::size_t>(2, (size + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = size - used; i < size; ++i) {
    const double lx = std::log(static_cast<double>(n_values[i]));
    const double ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(used);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<ComplexValue> default_z_samples() {
  std::vector<ComplexValue> z;
  for (double r : {0.5, 1.0, 1.5, 2.0})
    for (double phi : {0.0, std::numbers::pi / 2, -std::numbers::pi / 2})
      z.push_back(polar(Real(r), Real(phi)));
  return z;
}

ConvergenceReport verify_pn_asymptotics(const Experiment& ex, const std::vector<int>& n_list,
                                        const std::vector<ComplexValue>& z_samples) {
  ConvergenceReport r = start_report(ex, "p", n_list);
  const double m = r.constants.m_theta;
  r.predicted_rate = (1 - m) / (1 + m);
  for (int n : n_list) {
    with_escalation(ex, n, [&](const BiorthogonalSystem& sys) {
      PrecisionGuard g(sys.mantissa_bits);
      PrecisionContext c = ex.ctx;
      c.mantissa_bits = sys.mantissa_bits;
      const Real theta = at_current_precision(ex.theta);
      const Real alpha = at_current_precision(ex.alpha);
      WrightBessel target({(alpha + 1) / theta, 1 / theta}, c);
      const Real s = scaled_length(r.constants, theta, n);
      const Real cn = scale_constant_p(r.constants, alpha, theta, n);
      const Real sign = n % 2 ? Real(-1) : Real(1);
      Real worst = 0;
      for (const auto& z : z_samples) {
        ComplexValue value;
        const Real bound = evaluate_with_budget(sys.p_coeffs[n], widen(z) / s, value);
        check_budget(bound, cn, sys.mantissa_bits);
        worst = max(worst, abs(value / (sign * cn) - target(widen(z) * theta)));
      }
      r.n_values.push_back(n);
      r.errors.push_back(to_d(worst));
      r.ratios.push_back(kNaN);
      r.bits_used.push_back(sys.mantissa_bits);
      r.scale_constants.push_back(to_d(cn));
    });
  }
  finish_report(r);
  return r;
}

ConvergenceReport verify_qn_asymptotics(const Experiment& ex, const std::vector<int>& n_list,
                                        const std::vector<ComplexValue>& z_samples) {
  ConvergenceReport r = start_report(ex, "q", n_list);
  const double m = r.constants.m_theta;
  r.predicted_rate = (1 - m) / (1 + m);
  for (int n : n_list) {
    with_escalation(ex, n, [&](const BiorthogonalSystem& sys) {
      PrecisionGuard g(sys.mantissa_bits);
      PrecisionContext c = ex.ctx;
      c.mantissa_bits = sys.mantissa_bits;
      const Real theta = at_current_precision(ex.theta);
      const Real alpha = at_current_precision(ex.alpha);
      WrightBessel target({alpha + 1, theta}, c);
      const Real s = scaled_length(r.constants, theta, n);
      const Real cn = scale_constant_q(r.constants, alpha, theta, n);
      const Real sign = n % 2 ? Real(-1) : Real(1);
      Real worst = 0;
      for (const auto& z : z_samples) {
        const ComplexValue zc = widen(z);
        ComplexValue value;
        const Real bound = evaluate_with_budget(sys.q_coeffs[n], pow(zc / s, theta), value);
        check_budget(bound, cn, sys.mantissa_bits);
        worst = max(worst, abs(value / (sign * cn) - target(pow(zc * theta, theta))));
      }
      r.n_values.push_back(n);
      r.errors.push_back(to_d(worst));
      r.ratios.push_back(kNaN);
      r.bits_used.push_back(sys.mantissa_bits);
      r.scale_constants.push_back(to_d(cn));
    });
  }
  finish_report(r);
  return r;
}

ConvergenceReport verify_kappa(const Experiment& ex, const std::vector<int>& n_list) {
  ConvergenceReport r = start_report(ex, "kappa", n_list);
  const double m = r.constants.m_theta;
  r.predicted_rate = -m / (m + 1);
  for (int n : n_list) {
    const BiorthogonalSystem sys = ex.system(n, ex.ctx.mantissa_bits);
    PrecisionGuard g(sys.mantissa_bits);
    const Real pred =
        kappa_prediction(r.constants, at_current_precision(ex.alpha), at_current_precision(ex.theta), n);
    const double ratio = to_d(sys.kappas[n] / pred);
    r.n_values.push_back(n);
    r.errors.push_back(std::fabs(ratio - 1));
    r.ratios.push_back(ratio);
    r.bits_used.push_back(sys.mantissa_bits);
    r.scale_constants.push_back(to_d(pred));
  }
  finish_report(r);
  return r;
}

std::string to_string(KernelScaling s) { return s == KernelScaling::with_theta ? "with_theta" : "without_theta"; }

std::vector<ConvergenceReport> verify_kernel_limit(const Experiment& ex, const std::vector<int>& n_list,
                                                   const std::vector<KernelPoint>& points) {
  const ConvergenceReport blank = start_report(ex, "kernel", n_list);
  const double m = blank.constants.m_theta;
  std::vector<ConvergenceReport> reports;
  std::vector<double> targets;
  for (const auto& pt : points) {
    if (!(pt.x > 0) || !(pt.y > 0)) throw DomainError("kernel points must be positive");
    PrecisionGuard g(ex.ctx.mantissa_bits);
    const Real target = pow(Real(pt.x), ex.alpha) * limit_kernel(Real(pt.x), Real(pt.y), ex.alpha, ex.theta, ex.ctx);
    for (KernelScaling s : {KernelScaling::with_theta, KernelScaling::without_theta}) {
      ConvergenceReport r = blank;
      r.label = "x=" + std::to_string(pt.x) + " y=" + std::to_string(pt.y) + " scaling=" + to_string(s);
      r.predicted_rate = (1 - m) / (1 + m);
      reports.push_back(std::move(r));
      targets.push_back(to_d(target));
    }
  }
  for (int n : n_list) {
    const BiorthogonalSystem sys = ex.system(n, ex.ctx.mantissa_bits);
    PrecisionGuard g(sys.mantissa_bits);
    const Real theta = at_current_precision(ex.theta);
    const Real s = scaled_length(blank.constants, theta, n);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const KernelPoint& pt = points[i / 2];
      const Real arg_scale = i % 2 == 0 ? theta * s : s;
      const Real value = kernel_n(sys, Real(pt.x) / arg_scale, Real(pt.y) / arg_scale) / (theta * s);
      auto& r = reports[i];
      r.n_values.push_back(n);
      r.errors.push_back(std::fabs(to_d(value) / targets[i] - 1));
      r.ratios.push_back(to_d(value));
      r.bits_used.push_back(sys.mantissa_bits);
      r.scale_constants.push_back(targets[i]);
    }
  }
  for (auto& r : reports) finish_report(r);
  return reports;
}

RhCheck check_rh_problem(const BiorthogonalSystem& sys, const std::vector<double>& points, double tail_radius,
                         const PrecisionContext& ctx) {
  const int n = sys.params.n;
  if (sys.degree < n) throw DegreeTooLow("RH check needs p_n");
  RhCheck out;
  out.points = points;
  out.tail_radius = tail_radius;
  PrecisionGuard g(ctx.mantissa_bits);
  const Real theta = at_current_precision(sys.params.theta);
  for (double xd : points) {
    const Real x(xd);
    const ComplexValue z(x);
    const ComplexValue jump =
        cauchy_transform_p(sys, n, z, Side::plus, ctx) - cauchy_transform_p(sys, n, z, Side::minus, ctx);
    const Real expected = sys.p(n, x) * sys.weight(x) / (theta * pow(x, theta - 1));
    out.jump_residuals.push_back(to_d(abs(jump - ComplexValue(expected))));
  }
  const ComplexValue z = polar(Real(tail_radius), pi() / (3 * max(theta, Real(1))));
  const ComplexValue cp = cauchy_transform_p(sys, n, z, Side::none, ctx);
  out.tail_value = cp * ComplexValue(Real(0), 2 * pi()) * ipow(pow(z, theta), n + 1) / sys.kappas[n];
  return out;
}

}  // namespace mbh
