#pragma once

#include "mbh/precision.hpp"

#include <cmath>
#include <ostream>

namespace mbh {

// Minimal complex number over an arbitrary real scalar. std::complex is only
// specified for the built-in floating point types.
template <class T>
struct Complex {
  T re{};
  T im{};

  Complex() = default;
  Complex(T r) : re(std::move(r)), im(0) {}  // NOLINT: implicit by design
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
  Complex(int r) : re(r), im(0) {}  // NOLINT
  template <class U>
    requires(!std::is_same_v<U, T> && std::is_floating_point_v<U>)
  Complex(U r) : re(r), im(0) {}  // NOLINT

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const T& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T den = o.re * o.re + o.im * o.im;
    T r = (re * o.re + im * o.im) / den;
    im = (im * o.re - re * o.im) / den;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const T& s) {
    re /= s;
    im /= s;
    return *this;
  }
  Complex operator-() const { return {-re, -im}; }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(Complex a, const T& s) { return a *= s; }
  friend Complex operator*(const T& s, Complex a) { return a *= s; }
  friend Complex operator/(Complex a, const T& s) { return a /= s; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

  friend std::ostream& operator<<(std::ostream& os, const Complex& z) {
    return os << '(' << z.re << ',' << z.im << ')';
  }
};

using ComplexValue = Complex<Real>;
using ComplexD = Complex<double>;

namespace detail {
inline double hypot2(double a, double b) { return std::hypot(a, b); }
inline Real hypot2(const Real& a, const Real& b) { return sqrt(a * a + b * b); }
}  // namespace detail

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return {z.re, -z.im};
}
template <class T>
T norm(const Complex<T>& z) {
  return z.re * z.re + z.im * z.im;
}
template <class T>
T abs(const Complex<T>& z) {
  return detail::hypot2(z.re, z.im);
}
template <class T>
T arg(const Complex<T>& z) {
  using std::atan2;
  return atan2(z.im, z.re);
}
template <class T>
Complex<T> polar(const T& r, const T& phi) {
  using std::cos;
  using std::sin;
  return {r * cos(phi), r * sin(phi)};
}
// e^{i phi}
template <class T>
Complex<T> expi(const T& phi) {
  using std::cos;
  using std::sin;
  return {cos(phi), sin(phi)};
}
template <class T>
Complex<T> exp(const Complex<T>& z) {
  using std::exp;
  T m = exp(z.re);
  return polar(m, z.im);
}
// Principal branch, arg in (-pi, pi].
template <class T>
Complex<T> log(const Complex<T>& z) {
  using std::log;
  return {log(abs(z)), arg(z)};
}
template <class T>
Complex<T> sqrt(const Complex<T>& z) {
  using std::sqrt;
  T r = abs(z);
  if (r == 0) return {T(0), T(0)};
  T a = sqrt((r + (z.re < 0 ? -z.re : z.re)) / 2);
  if (z.re >= 0) return {a, z.im / (2 * a)};
  T b = z.im < 0 ? -a : a;
  T a2 = z.im / (2 * b);
  return {a2 < 0 ? -a2 : a2, b};
}
// Principal power z^p = exp(p log z).
template <class T>
Complex<T> pow(const Complex<T>& z, const T& p) {
  if (z.re == 0 && z.im == 0) return {T(0), T(0)};
  return exp(log(z) * p);
}
template <class T>
Complex<T> pow(const Complex<T>& z, const Complex<T>& p) {
  if (z.re == 0 && z.im == 0) return {T(0), T(0)};
  return exp(log(z) * p);
}
template <class T>
Complex<T> ipow(Complex<T> z, long k) {
  if (k < 0) return Complex<T>(T(1)) / ipow(z, -k);
  Complex<T> r(T(1));
  while (k) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}
template <class T>
Complex<T> sin(const Complex<T>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}
template <class T>
Complex<T> cos(const Complex<T>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {cos(z.re) * cosh(z.im), -(sin(z.re) * sinh(z.im))};
}
template <class T>
bool isfinite(const Complex<T>& z) {
  using boost::multiprecision::isfinite;
  using std::isfinite;
  return isfinite(z.re) && isfinite(z.im);
}

inline ComplexValue to_real_complex(const ComplexD& z) { return {Real(z.re), Real(z.im)}; }
inline ComplexD to_double(const ComplexValue& z) {
  return {z.re.convert_to<double>(), z.im.convert_to<double>()};
}
inline ComplexValue at_current_precision(const ComplexValue& z) {
  return {at_current_precision(z.re), at_current_precision(z.im)};
}

// pi at the current default precision.
inline Real pi() {
  Real p;
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return p;
}

}  // namespace mbh
