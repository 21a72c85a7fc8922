#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>

namespace mbh {

// Variable precision MPFR float. Expression templates are disabled so that
// `auto` never captures a dangling expression.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline Real max(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real min(const Real& a, const Real& b) { return b < a ? b : a; }

inline unsigned digits10_for_bits(int bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

struct PrecisionContext {
  int mantissa_bits = 256;
  double rel_tol = 0.0;  // 0 selects 2^-(mantissa_bits/2)
  int max_series_terms = 20000;
  int quad_points_circle = 64;
  int quad_points_line = 64;

  static PrecisionContext with_bits(int bits) {
    PrecisionContext ctx;
    ctx.mantissa_bits = bits;
    return ctx;
  }

  double tolerance() const {
    return rel_tol > 0.0 ? rel_tol : std::ldexp(1.0, -(mantissa_bits / 2));
  }
  // Number of bits the tolerance asks for.
  int tolerance_bits() const { return static_cast<int>(std::ceil(-std::log2(tolerance()))); }

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

// Sets the default MPFR precision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(int bits) : saved_(Real::default_precision()) {
    Real::default_precision(digits10_for_bits(bits));
  }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;
  ~PrecisionGuard() { Real::default_precision(saved_); }

 private:
  unsigned saved_;
};

// Copy of x carried at the current default precision.
inline Real at_current_precision(const Real& x) {
  Real r = x;
  r.precision(Real::default_precision());
  return r;
}

std::string to_decimal(const Real& x);

}  // namespace mbh
