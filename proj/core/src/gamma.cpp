#include "mbh/gamma.hpp"

#include "mbh/errors.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace mbh {
namespace {

// Spouge's approximation
//   Gamma(z+1) = (z+a)^{z+1/2} e^{-(z+a)} [c_0 + sum_{k=1}^{a-1} c_k/(z+k) + eps]
// with |eps| roughly (2 pi)^{-a}.
struct SpougeTable {
  int a = 0;
  int work_bits = 0;
  std::vector<Real> coeff;  // coeff[0] = sqrt(2 pi)
};

const SpougeTable& spouge_table(int bits) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<SpougeTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[bits];
  if (slot) return *slot;

  auto table = std::make_unique<SpougeTable>();
  const int target = bits + 8;
  table->a = static_cast<int>(std::ceil(target * std::log(2.0) / std::log(2.0 * M_PI))) + 1;
  const int a = table->a;
  double max_log = 0.5 * std::log(2.0 * M_PI);
  for (int k = 1; k < a; ++k) {
    double lc = (k - 0.5) * std::log(double(a - k)) + (a - k) - std::lgamma(double(k));
    max_log = std::max(max_log, lc);
  }
  table->work_bits = target + static_cast<int>(std::ceil(max_log / std::log(2.0))) + 16;

  PrecisionGuard guard(table->work_bits);
  table->coeff.resize(a);
  table->coeff[0] = sqrt(2 * pi());
  Real factorial = 1;
  for (int k = 1; k < a; ++k) {
    if (k > 1) factorial *= (k - 1);
    Real base = a - k;
    Real c = pow(base, Real(k) - Real(0.5)) * exp(base) / factorial;
    table->coeff[k] = (k % 2 == 1) ? c : Real(-c);
  }
  slot = std::move(table);
  return *slot;
}

void check_pole(const ComplexValue& v, const PrecisionContext& ctx) {
  if (v.re > Real(0.5)) return;
  Real k = round(v.re);
  Real tol = ctx.tolerance();
  if (abs(v.im) <= tol && abs(v.re - k) <= tol) throw PoleError("log_gamma: argument at a pole of Gamma");
}

// Imaginary part of the principal log Gamma in double precision: Stirling
// after shifting to |w| >= 15. Only used to pick the 2 pi branch.
double log_gamma_imag_estimate(std::complex<double> w) {
  double correction = 0.0;
  while (std::abs(w) < 15.0 || w.real() < 0.5) {
    correction += std::arg(w);
    w += 1.0;
  }
  std::complex<double> s = (w - 0.5) * std::log(w) - w + 1.0 / (12.0 * w) - 1.0 / (360.0 * w * w * w);
  return s.imag() - correction;
}

// log Gamma(w) for Re w >= 1/2 at the table's working precision.
ComplexValue spouge_log_gamma(const ComplexValue& w, const SpougeTable& t) {
  const ComplexValue z = w - ComplexValue(Real(1));
  ComplexValue sum(t.coeff[0]);
  for (int k = 1; k < t.a; ++k) {
    ComplexValue d = z + ComplexValue(Real(k));
    sum += ComplexValue(t.coeff[k]) / d;
  }
  const ComplexValue za = z + ComplexValue(Real(t.a));
  ComplexValue r = (z + ComplexValue(Real(0.5))) * log(za) - za + log(sum);
  // log(sum) is only defined mod 2 pi i; align with the continuous branch.
  if (w.im != 0) {
    const double est = log_gamma_imag_estimate({w.re.convert_to<double>(), w.im.convert_to<double>()});
    const Real two_pi = 2 * pi();
    const double turns = std::round((est - r.im.convert_to<double>()) / two_pi.convert_to<double>());
    if (turns != 0.0) r.im += two_pi * turns;
  }
  return r;
}

ComplexValue round_to(const ComplexValue& v, int bits) {
  ComplexValue r = v;
  r.re.precision(digits10_for_bits(bits));
  r.im.precision(digits10_for_bits(bits));
  return r;
}

}  // namespace

ComplexValue log_gamma(const ComplexValue& v, const PrecisionContext& ctx) {
  check_pole(v, ctx);
  const SpougeTable& t = spouge_table(ctx.mantissa_bits);
  ComplexValue result;
  {
    PrecisionGuard guard(t.work_bits);
    ComplexValue w = at_current_precision(v);
    if (w.re >= Real(0.5)) {
      result = spouge_log_gamma(w, t);
    } else {
      // Shift right and subtract principal logs.
      const long m = static_cast<long>(ceil(Real(0.5) - w.re).convert_to<double>());
      ComplexValue shifted = w + ComplexValue(Real(m));
      result = spouge_log_gamma(shifted, t);
      for (long k = 0; k < m; ++k) result -= log(w + ComplexValue(Real(k)));
    }
  }
  return round_to(result, ctx.mantissa_bits);
}

ComplexValue gamma(const ComplexValue& v, const PrecisionContext& ctx) {
  check_pole(v, ctx);
  const SpougeTable& t = spouge_table(ctx.mantissa_bits);
  ComplexValue result;
  {
    PrecisionGuard guard(t.work_bits);
    ComplexValue w = at_current_precision(v);
    if (w.re >= Real(0.5)) {
      result = exp(spouge_log_gamma(w, t));
    } else {
      const Real p = pi();
      ComplexValue one_minus = ComplexValue(Real(1)) - w;
      ComplexValue s = sin(w * p);
      result = ComplexValue(p) / (s * exp(spouge_log_gamma(one_minus, t)));
    }
  }
  return round_to(result, ctx.mantissa_bits);
}

ComplexValue rgamma(const ComplexValue& v, const PrecisionContext& ctx) {
  const SpougeTable& t = spouge_table(ctx.mantissa_bits);
  ComplexValue result;
  {
    PrecisionGuard guard(t.work_bits);
    ComplexValue w = at_current_precision(v);
    if (w.re >= Real(0.5)) {
      result = exp(-spouge_log_gamma(w, t));
    } else {
      if (w.im == 0 && w.re == round(w.re)) return {Real(0), Real(0)};
      const Real p = pi();
      ComplexValue one_minus = ComplexValue(Real(1)) - w;
      ComplexValue s = sin(w * p);
      result = s * exp(spouge_log_gamma(one_minus, t)) / p;
    }
  }
  return round_to(result, ctx.mantissa_bits);
}

Real rgamma(const Real& x) {
  if (x <= 0 && x == round(x)) return Real(0);
  if (x >= Real(0.5)) return 1 / tgamma(x);
  // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
  return sin(pi() * x) * tgamma(1 - x) / pi();
}

}  // namespace mbh
