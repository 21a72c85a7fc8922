#include "mbh/wright.hpp"

#include "mbh/errors.hpp"
#include "mbh/gamma.hpp"

#include <cmath>

namespace mbh {
namespace {

double log2abs_d(const ComplexValue& z) {
  auto l = [](const Real& x) -> double {
    if (x == 0) return -INFINITY;
    long e = 0;
    double d = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
    return static_cast<double>(e) + std::log2(std::fabs(d));
  };
  double a = l(z.re);
  double b = l(z.im);
  double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + 0.5 * std::log2(std::exp2(2 * (a - m)) + std::exp2(2 * (b - m)));
}

}  // namespace

WrightBessel::WrightBessel(WrightParams params, PrecisionContext ctx)
    : params_(std::move(params)), ctx_(ctx), a1_(params_.a1.convert_to<double>()), a2_(params_.a2.convert_to<double>()) {
  if (!(params_.a2 > 0)) throw DomainError("wright_bessel: a2 must be positive");
}

double WrightBessel::log2_term(std::size_t j, double log2x) const {
  const double arg = a1_ + static_cast<double>(j) * a2_;
  if (arg <= 0 && arg == std::round(arg)) return -INFINITY;
  return j * log2x - (std::lgamma(j + 1.0) + std::lgamma(arg)) / std::log(2.0);
}

const std::vector<Real>& WrightBessel::coefficients(int bits, std::size_t count) const {
  Table& t = tables_[bits];
  if (t.coeff.size() >= count) return t.coeff;
  PrecisionGuard guard(bits);
  const Real a1 = at_current_precision(params_.a1);
  const Real a2 = at_current_precision(params_.a2);
  Real inv_fact = 1;
  for (std::size_t j = 1; j < t.coeff.size(); ++j) inv_fact /= j;
  for (std::size_t j = t.coeff.size(); j < count; ++j) {
    if (j > 0) inv_fact /= j;
    t.coeff.push_back(inv_fact * rgamma(a1 + a2 * j));
  }
  return t.coeff;
}

ComplexValue WrightBessel::operator()(const ComplexValue& x) const {
  if (x.re == 0 && x.im == 0) {
    PrecisionGuard guard(ctx_.mantissa_bits);
    return ComplexValue(rgamma(at_current_precision(params_.a1)));
  }
  const double log2x = log2abs_d(x);
  const int target = ctx_.mantissa_bits + 8;

  // Double-precision scan of the term envelope.
  double peak = log2_term(0, log2x);
  std::size_t peak_at = 0;
  std::size_t count = 1;
  auto extend = [&](int bits) {
    for (std::size_t j = count;; ++j) {
      if (j > static_cast<std::size_t>(ctx_.max_series_terms))
        throw NonConvergence("wright_bessel: max_series_terms exceeded");
      double l = log2_term(j, log2x);
      if (l > peak || !std::isfinite(peak)) {
        peak = l;
        peak_at = j;
      }
      const bool past_pole_region = a1_ + j * a2_ > 0;
      if (j > peak_at + 1 && past_pole_region && std::isfinite(l) && l < peak - bits - 8) {
        count = j;
        return;
      }
    }
  };

  extend(target);
  auto rounded = [](double b) { return 64 * static_cast<int>(std::ceil(b / 64.0)); };
  int bits = rounded(target + 16 + std::max(0.0, std::ceil(peak)));
  ComplexValue sum;
  for (int pass = 0; pass < 6; ++pass) {
    extend(bits);
    const std::vector<Real>& c = coefficients(bits, count);
    {
      PrecisionGuard guard(bits);
      const ComplexValue minus_x = -at_current_precision(x);
      ComplexValue power(Real(1));
      sum = ComplexValue(Real(0));
      for (std::size_t j = 0; j < count; ++j) {
        if (j > 0) power *= minus_x;
        if (c[j] != 0) sum += power * c[j];
      }
    }
    const double mag = log2abs_d(sum);
    const double have = std::isfinite(mag) ? bits - (peak - mag) : 0.0;
    if (have >= target) break;
    // Cancellation ate the guard bits; retry with the measured loss.
    const double loss = std::isfinite(mag) ? peak - mag : bits;
    bits = rounded(target + 24 + std::max(loss, 0.0));
    if (pass == 5) throw PrecisionLoss("wright_bessel: cancellation exceeds precision budget");
  }
  sum.re.precision(digits10_for_bits(ctx_.mantissa_bits));
  sum.im.precision(digits10_for_bits(ctx_.mantissa_bits));
  return sum;
}

ComplexValue wright_bessel(const WrightParams& params, const ComplexValue& x, const PrecisionContext& ctx) {
  return WrightBessel(params, ctx)(x);
}

}  // namespace mbh
