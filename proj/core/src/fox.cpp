#include "mbh/fox.hpp"

#include "mbh/errors.hpp"
#include "mbh/gamma.hpp"

#include <cmath>

namespace mbh {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Opening of the parabolic contour v(t) = x0 + t^2 + i width t. All poles sit
// at distance width/2 below the real t axis.
constexpr double kWidth = 4.0;
// Fraction of the pole-free strip used in the trapezoid error estimate.
constexpr double kStripUse = 0.8;

double log2abs(const Real& x) {
  if (x == 0) return -INFINITY;
  long e = 0;
  double d = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
  return static_cast<double>(e) + std::log2(std::fabs(d));
}
double log2abs(const ComplexValue& z) {
  double a = log2abs(z.re);
  double b = log2abs(z.im);
  double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + 0.5 * std::log2(std::exp2(2 * (a - m)) + std::exp2(2 * (b - m)));
}

int round_bits(double bits) { return 32 * static_cast<int>(std::ceil(bits / 32.0)); }

ComplexValue at_bits(ComplexValue z, int bits) {
  z.re.precision(digits10_for_bits(bits));
  z.im.precision(digits10_for_bits(bits));
  return z;
}

// Distance from x to the nearest pole of Gamma (inf when x > 0.5).
double pole_distance(double x) {
  if (x > 0.5) return INFINITY;
  return std::fabs(x - std::round(x));
}

}  // namespace

Real u_scale(const Real& theta) {
  const Real t1 = theta + 1;
  return pow(theta / t1, theta / t1) * pow(1 / t1, 1 / t1);
}

FoxI::FoxI(FoxKind kind, FoxIParams params, PrecisionContext ctx, FoxMethod method)
    : kind_(kind), params_(std::move(params)), ctx_(ctx), method_(method) {
  if (!(params_.theta > 0)) throw DomainError("fox_I: theta must be positive");
  theta_d_ = params_.theta.convert_to<double>();
  a_d_ = params_.a.convert_to<double>();
  const double c1 = theta_d_ / (theta_d_ + 1);
  const double c2 = 1 / (theta_d_ + 1);
  const double first = (0.5 - a_d_) / c1;
  const double second = a_d_ / c2;
  switch (kind_) {
    case FoxKind::first: pole_min_ = first; break;
    case FoxKind::second: pole_min_ = std::min(first, second); break;
    case FoxKind::third: pole_min_ = second; break;
  }
}

void FoxI::check_argument(const ComplexValue& z) const {
  if (z.im == 0 && z.re <= 0) throw DomainError("fox_I: argument on the branch cut (-inf, 0]");
}

ComplexValue FoxI::gamma_factor(const ComplexValue& v, const PrecisionContext& work) const {
  const Real theta = at_current_precision(params_.theta);
  const Real a = at_current_precision(params_.a);
  const Real c1 = theta / (theta + 1);
  const Real c2 = 1 / (theta + 1);
  const ComplexValue half_minus = ComplexValue(Real(0.5) - a) - v * c1;  // 1/2 - a - c1 v
  const ComplexValue a_minus = ComplexValue(a) - v * c2;                  // a - c2 v
  switch (kind_) {
    case FoxKind::first:
      return gamma(half_minus, work) * rgamma(ComplexValue(Real(1) - a) + v * c2, work);
    case FoxKind::second:
      return gamma(half_minus, work) * gamma(a_minus, work);
    case FoxKind::third:
      return gamma(a_minus, work) * rgamma(ComplexValue(Real(0.5) + a) + v * c1, work);
  }
  return {};
}

FoxI::Nodes& FoxI::nodes(int bits, int level) const {
  auto [it, inserted] = cache_.try_emplace({bits, level});
  Nodes& n = it->second;
  if (inserted) {
    PrecisionGuard guard(bits);
    const double target = ctx_.tolerance_bits() + 10.0;
    const Real strip = Real(kStripUse * kWidth / 2);
    n.h = 2 * pi() * strip / (Real(kLn2) * target) / pow(Real(2), level);
    n.width = kWidth;
    n.x0 = Real(pole_min_) - n.width * n.width / 4;
  }
  return n;
}

void FoxI::extend(Nodes& n, int bits, bool positive, std::size_t count) const {
  auto& w = positive ? n.pos : n.neg;
  auto& l = positive ? n.lpos : n.lneg;
  if (w.size() >= count) return;
  PrecisionGuard guard(bits);
  PrecisionContext work = ctx_;
  work.mantissa_bits = bits;
  work.rel_tol = 0.0;
  const ComplexValue two_pi_i(Real(0), 2 * pi());
  for (std::size_t j = w.size(); j < count; ++j) {
    const long k = positive ? static_cast<long>(j) : -static_cast<long>(j + 1);
    const Real t = n.h * k;
    const ComplexValue v(n.x0 + t * t, n.width * t);
    const ComplexValue dv(2 * t, n.width);
    ComplexValue wk = gamma_factor(v, work) * dv * n.h / two_pi_i;
    l.push_back(log2abs(wk));
    w.push_back(std::move(wk));
  }
}

ComplexValue FoxI::mellin_barnes(const ComplexValue& z, int extra_levels) const {
  check_argument(z);
  const double zr = z.re.convert_to<double>();
  const double zi = z.im.convert_to<double>();
  const double us = u_scale(params_.theta).convert_to<double>();
  const double log2u = std::log2(us) + log2abs(z);
  const double argu = std::atan2(zi, zr);

  const double target = ctx_.tolerance_bits() + 10.0;
  const double c2w = kWidth * kWidth;
  const double amplification = 0.81 * c2w * std::max(0.0, -log2u) + 0.24 * c2w * std::max(0.0, log2u) + 8.0;
  auto level_for = [&](double loss) {
    return std::max(0, static_cast<int>(std::ceil(std::log2((target + amplification + loss) / target)))) + extra_levels;
  };
  int level = level_for(0.0);
  int bits = round_bits(ctx_.mantissa_bits + 24 + 0.25 * c2w * std::max(0.0, -log2u));

  ComplexValue sum;
  for (int pass = 0; pass < 6; ++pass) {
    Nodes& n = nodes(bits, level);
    const double h = n.h.convert_to<double>();
    const double x0 = n.x0.convert_to<double>();
    const double lnu = log2u * kLn2;

    // Truncation in double: log2 of |W_k u^{v_k}|.
    double peak = -INFINITY;
    double t_peak = 0.0;
    auto scan = [&](bool positive) {
      std::size_t quiet = 0;
      long peak_at = 0;
      double peak_lt = -INFINITY;
      for (std::size_t j = 0;; ++j) {
        if (j > 200000) throw ContourNonConvergence("fox_I: contour truncation not reached");
        extend(n, bits, positive, j + 1);
        const double t = h * (positive ? static_cast<double>(j) : -static_cast<double>(j + 1));
        const double re_v = x0 + t * t;
        const double im_v = kWidth * t;
        const double lt = (positive ? n.lpos[j] : n.lneg[j]) + (re_v * lnu - im_v * argu) / kLn2;
        if (lt > peak) {
          peak = lt;
          t_peak = t;
        }
        if (lt > peak_lt) {
          peak_lt = lt;
          peak_at = static_cast<long>(j);
        }
        if (static_cast<long>(j) > peak_at + 3 && lt < peak_lt - bits - 8) {
          if (++quiet >= 3) return j + 1;
        } else {
          quiet = 0;
        }
      }
    };
    const std::size_t kp = scan(true);
    const std::size_t km = scan(false);

    {
      PrecisionGuard guard(bits);
      const Real theta = at_current_precision(params_.theta);
      const ComplexValue u = at_current_precision(z) * u_scale(theta);
      const ComplexValue L = log(u);
      const ComplexValue A = exp(L * n.x0);
      const ComplexValue Q = exp(L * (n.h * n.h));
      const ComplexValue Q2 = Q * Q;
      const ComplexValue icL = ComplexValue(-L.im, L.re) * (n.width * n.h);  // i width h L
      const ComplexValue P = exp(icL);
      const ComplexValue Pinv = exp(-icL);

      sum = ComplexValue(Real(0));
      ComplexValue e = A;
      ComplexValue step = Q * P;
      for (std::size_t j = 0; j < kp; ++j) {
        sum += n.pos[j] * e;
        e *= step;
        step *= Q2;
      }
      e = A * Q * Pinv;
      step = Q * Q2 * Pinv;
      for (std::size_t j = 0; j < km; ++j) {
        sum += n.neg[j] * e;
        e *= step;
        step *= Q2;
      }
    }
    const double mag = log2abs(sum);
    // Cancellation between nodes costs both working bits and trapezoid accuracy.
    const double loss = std::isfinite(mag) ? std::max(0.0, peak - mag) : ctx_.mantissa_bits;
    const double need = ctx_.mantissa_bits + 8 + loss;
    // Off the real t axis the factor e^{-Im v arg u} grows faster by e^{2 d |arg u| t}.
    const double strip = kStripUse * kWidth / 2;
    const double strip_growth = 2 * strip * std::fabs(argu) * std::fabs(t_peak) / kLn2;
    const int need_level = level_for(loss + strip_growth);
    if (std::isfinite(mag) && bits >= need && level >= need_level) break;
    if (pass == 5) throw PrecisionLoss("fox_I: cancellation exceeds precision budget");
    if (bits < need) bits = round_bits((std::isfinite(mag) ? need : bits + ctx_.mantissa_bits) + 16);
    level = std::max(level, need_level);
  }
  return at_bits(sum, ctx_.mantissa_bits);
}

ComplexValue FoxI::second_kind_residues(const ComplexValue& z) const {
  const double theta = theta_d_;
  const double a = a_d_;
  const double c1 = theta / (theta + 1);
  const double c2 = 1 / (theta + 1);
  const double log2u = std::log2(u_scale(params_.theta).convert_to<double>()) + log2abs(z);

  struct Term {
    double v;           // exponent of u
    double gamma_arg;   // argument of the surviving Gamma
    double coeff_log2;  // log2 |(-1)^k/(k! c)|
    int sign;
    double c;
    int index;
    bool first_lattice;
  };
  std::vector<Term> terms;
  double peak = -INFINITY;
  auto collect = [&](bool first_lattice) {
    double local_peak = -INFINITY;
    long peak_at = 0;
    for (int k = 0;; ++k) {
      if (k > ctx_.max_series_terms) throw NonConvergence("fox_I: residue series did not converge");
      Term t;
      t.index = k;
      t.sign = (k % 2 == 0) ? 1 : -1;
      t.first_lattice = first_lattice;
      if (first_lattice) {
        t.v = (0.5 - a + k) / c1;
        t.gamma_arg = a - c2 * t.v;
        t.c = c1;
      } else {
        t.v = (a + k) / c2;
        t.gamma_arg = 0.5 - a - c1 * t.v;
        t.c = c2;
      }
      if (pole_distance(t.gamma_arg) < 1e-3)
        throw DomainError("fox_I: resonant parameters, residue series unavailable");
      t.coeff_log2 = -(std::lgamma(k + 1.0) + std::log(t.c)) / kLn2;
      const double lt = t.coeff_log2 + std::lgamma(t.gamma_arg) / kLn2 + t.v * log2u;
      if (lt > local_peak) {
        local_peak = lt;
        peak_at = k;
      }
      peak = std::max(peak, lt);
      terms.push_back(t);
      if (k > peak_at + 3 && lt < local_peak - 2 * ctx_.mantissa_bits - 64 - std::max(0.0, local_peak)) return;
    }
  };
  collect(true);
  collect(false);

  int bits = round_bits(ctx_.mantissa_bits + 32 + std::max(0.0, peak));
  ComplexValue sum;
  for (int pass = 0; pass < 6; ++pass) {
    {
      PrecisionGuard guard(bits);
      const Real theta_r = at_current_precision(params_.theta);
      const Real a_r = at_current_precision(params_.a);
      const Real c1r = theta_r / (theta_r + 1);
      const Real c2r = 1 / (theta_r + 1);
      const ComplexValue L = log(at_current_precision(z) * u_scale(theta_r));
      sum = ComplexValue(Real(0));
      Real fact = 1;
      int last_index = -1;
      for (const Term& t : terms) {
        if (t.index == 0) fact = 1;
        else if (t.index != last_index) fact *= t.index;
        last_index = t.index;
        const bool first_lattice = t.first_lattice;
        const Real v = first_lattice ? (Real(0.5) - a_r + t.index) / c1r : (a_r + t.index) / c2r;
        const Real g = first_lattice ? tgamma(a_r - c2r * v) : tgamma(Real(0.5) - a_r - c1r * v);
        const Real coeff = Real(t.sign) * g / (fact * (first_lattice ? c1r : c2r));
        sum += exp(L * v) * coeff;
      }
    }
    const double mag = log2abs(sum);
    const double need = ctx_.mantissa_bits + 8 + std::max(0.0, peak - mag);
    if (std::isfinite(mag) && bits >= need) break;
    bits = round_bits((std::isfinite(mag) ? need : bits + ctx_.mantissa_bits) + 16);
  }
  return at_bits(sum, ctx_.mantissa_bits);
}

ComplexValue FoxI::series(const ComplexValue& z) const {
  check_argument(z);
  if (kind_ == FoxKind::second) return second_kind_residues(z);
  const int bits = ctx_.mantissa_bits + 32;
  PrecisionGuard guard(bits);
  const Real theta = at_current_precision(params_.theta);
  const Real a = at_current_precision(params_.a);
  if (!wright_) {
    WrightParams wp;
    if (kind_ == FoxKind::first) {
      wp = {(Real(0.5) - a) / theta + 1 - a, 1 / theta};
    } else {
      wp = {theta * a + Real(0.5) + a, theta};
    }
    PrecisionContext wctx = ctx_;
    wctx.mantissa_bits = bits;
    wctx.rel_tol = 0.0;
    wright_.emplace(wp, wctx);
  }
  const ComplexValue L = log(at_current_precision(z) * u_scale(theta));
  // first : (1 + 1/theta) u^{(1+1/theta)(1/2-a)} J(u^{1+1/theta})
  // third : (1 + theta)   u^{(1+theta) a}        J(u^{1+theta})
  const Real slope = kind_ == FoxKind::first ? 1 + 1 / theta : 1 + theta;
  const Real shift = kind_ == FoxKind::first ? (1 + 1 / theta) * (Real(0.5) - a) : (1 + theta) * a;
  ComplexValue r = exp(L * shift) * (*wright_)(exp(L * slope)) * slope;
  return at_bits(r, ctx_.mantissa_bits);
}

ComplexValue FoxI::operator()(const ComplexValue& z) const {
  return method_ == FoxMethod::series ? series(z) : mellin_barnes(z);
}

ComplexValue fox_I(FoxKind kind, const FoxIParams& params, const ComplexValue& z, const PrecisionContext& ctx,
                   FoxMethod method) {
  return FoxI(kind, params, ctx, method)(z);
}

ComplexValue fox_I_asymptotic(FoxKind kind, const FoxIParams& params, const ComplexValue& z,
                              const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.mantissa_bits);
  const Real theta = at_current_precision(params.theta);
  const Real a = at_current_precision(params.a);
  const ComplexValue w = at_current_precision(z);
  if (abs(w) < Real(kAsymptoticThreshold * (1 - 1e-12))) throw DomainError("fox_I_asymptotic: |z| below the asymptotic threshold");
  const Real p = pi();
  const Real phi = arg(w);
  const Real margin = Real(kAsymptoticSectorMargin);
  const Real base = sqrt(theta + 1) / (sqrt(2 * p) * pow(theta, a));
  switch (kind) {
    case FoxKind::second: {
      if (abs(phi) >= p - margin) throw SectorError("fox_I_asymptotic: arg z outside (-pi, pi)");
      return exp(-w) * (base * 2 * p);
    }
    case FoxKind::first:
    case FoxKind::third: {
      const Real limit = kind == FoxKind::first ? theta * p / (theta + 1) : p / (theta + 1);
      const Real rotation = kind == FoxKind::first ? p / (theta + 1) : theta * p / (theta + 1);
      const Real phase = kind == FoxKind::first ? (Real(0.5) - a) * p : a * p;
      if (abs(phi) <= margin || abs(phi) >= limit - margin)
        throw SectorError("fox_I_asymptotic: arg z outside the sector of the formula");
      const int s = phi > 0 ? 1 : -1;
      return expi(Real(s * phase)) * exp(-(w * expi(Real(s * rotation)))) * base;
    }
  }
  return {};
}

}  // namespace mbh
