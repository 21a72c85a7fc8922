#include "mbh/biorthogonal.hpp"

#include "mbh/errors.hpp"
#include "mbh/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mbh {
namespace {

using Matrix = std::vector<std::vector<Real>>;

Matrix square(int size) {
  return Matrix(static_cast<std::size_t>(size), std::vector<Real>(static_cast<std::size_t>(size), Real(0)));
}

// Length scale of the weight: n (V(x) - V(0)) = 1 + spread, found by bisection
// on a log scale. Only steers the exp-sinh substitution.
Real decay_scale(const WeightParams& params, double spread) {
  const auto& v = params.potential;
  const double target = (1.0 + spread) / params.n;
  const double v0 = v.value(0.0);
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = v.value(std::exp(mid)) - v0;
    (std::isfinite(g) && g > target ? hi : lo) = mid;
  }
  return Real(std::exp(0.5 * (lo + hi)));
}

// Moment quadratures ask for nearly the full working precision: the LDU step
// amplifies their error.
PrecisionContext moment_context(const PrecisionContext& ctx) {
  PrecisionContext m = ctx;
  m.rel_tol = std::ldexp(1.0, -std::min(ctx.mantissa_bits - 24, 1000));
  return m;
}

template <class T>
T horner(const std::vector<Real>& c, const T& x) {
  T acc(Real(0));
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + T(*it);
  return acc;
}

void check_index(const BiorthogonalSystem& sys, int j) {
  if (j < 0 || j > sys.degree) throw DegreeTooLow("index " + std::to_string(j) + " exceeds the system degree");
}

Matrix unit_lower_inverse(const Matrix& l) {
  const int size = static_cast<int>(l.size());
  Matrix inv = square(size);
  for (int i = 0; i < size; ++i) {
    inv[i][i] = 1;
    for (int j = i - 1; j >= 0; --j) {
      Real acc = 0;
      for (int k = j; k < i; ++k) acc += l[i][k] * inv[k][j];
      inv[i][j] = -acc;
    }
  }
  return inv;
}

// Integration ray for a Cauchy transform at z: rotated by -+phi0 away from
// the pole when z is near (0, inf), straight otherwise.
Real cauchy_ray(const BiorthogonalSystem& sys, const ComplexValue& z, Side side) {
  const bool on_axis = z.im == 0;
  if (on_axis && z.re <= 0) {
    if (z.re == 0) throw AxisError("Cauchy transform at the origin");
    return Real(0);
  }
  if (on_axis && side == Side::none) throw AxisError("point on (0, inf) needs a side");
  const auto& v = sys.params.potential;
  const double theta = sys.params.theta.convert_to<double>();
  const double phi0 = std::min({0.3, std::numbers::pi / (4.0 * theta), std::numbers::pi / (4.0 * v.degree())});
  const bool upper = on_axis ? side == Side::plus : z.im > 0;
  return Real(upper ? -phi0 : phi0);
}

}  // namespace

void WeightParams::validate() const {
  if (!(theta > 0)) throw DomainError("theta must be positive");
  if (!(alpha > -1)) throw DomainError("alpha must exceed -1");
  if (n < 1) throw DomainError("n must be at least 1");
  if (!potential.is_polynomial()) throw DomainError("biorthogonal systems need a polynomial potential");
  if (!potential.has_log_growth()) throw DomainError("potential " + potential.descriptor() + " does not grow");
}

Real BiorthogonalSystem::p(int j, const Real& x) const {
  check_index(*this, j);
  return horner(p_coeffs[j], x);
}

ComplexValue BiorthogonalSystem::p(int j, const ComplexValue& z) const {
  check_index(*this, j);
  return horner(p_coeffs[j], z);
}

Real BiorthogonalSystem::q(int k, const Real& t) const {
  check_index(*this, k);
  return horner(q_coeffs[k], t);
}

ComplexValue BiorthogonalSystem::q(int k, const ComplexValue& t) const {
  check_index(*this, k);
  return horner(q_coeffs[k], t);
}

Real BiorthogonalSystem::weight(const Real& x) const {
  return pow(x, params.alpha) * exp(-Real(params.n) * params.potential.value(x));
}

Real BiorthogonalSystem::moment_residual() const {
  PrecisionGuard guard(mantissa_bits);
  const int size = degree + 1;
  Real worst = 0;
  Real kmax = *std::max_element(kappas.begin(), kappas.end());
  for (int j = 0; j < size; ++j) {
    for (int k = 0; k < size; ++k) {
      if (j == k) continue;
      Real acc = 0;
      for (int a = 0; a <= j; ++a)
        for (int b = 0; b <= k; ++b) acc += p_coeffs[j][a] * moments[a][b] * q_coeffs[k][b];
      worst = max(worst, abs(acc));
    }
  }
  return worst / kmax;
}

Real mixed_moment(int j, int k, const WeightParams& params, const PrecisionContext& ctx) {
  if (j < 0 || k < 0) throw DomainError("moment indices must be non-negative");
  params.validate();
  const double alpha = params.alpha.convert_to<double>();
  SemiAxisIntegrand f;
  f.alpha = alpha + j + params.theta.convert_to<double>() * k;
  f.f = [&](const Real& x) {
    return pow(x, Real(j) + params.theta * k + params.alpha) * exp(-Real(params.n) * params.potential.value(x));
  };
  return quad_semiaxis(f, decay_scale(params, f.alpha), moment_context(ctx));
}

Matrix moment_matrix(const WeightParams& params, int degree, const PrecisionContext& ctx) {
  if (degree < 0) throw DomainError("degree must be non-negative");
  params.validate();
  const auto size = static_cast<std::size_t>(degree) + 1;
  auto f = [&](const Real& x, std::vector<Real>& out) {
    const Real w = pow(x, params.alpha) * exp(-Real(params.n) * params.potential.value(x));
    const Real t = pow(x, params.theta);
    Real xj = w;
    for (std::size_t j = 0; j < size; ++j) {
      Real cell = xj;
      for (std::size_t k = 0; k < size; ++k) {
        out[j * size + k] = cell;
        cell *= t;
      }
      xj *= x;
    }
  };
  const double spread = 0.5 * degree * (1.0 + params.theta.convert_to<double>());
  auto flat = quad_semiaxis_many(f, size * size, params.alpha.convert_to<double>(), decay_scale(params, spread),
                                 moment_context(ctx));
  Matrix m(size);
  for (std::size_t j = 0; j < size; ++j)
    m[j].assign(flat.begin() + static_cast<long>(j * size), flat.begin() + static_cast<long>((j + 1) * size));
  return m;
}

namespace {

struct Ldu {
  Matrix lower;
  Matrix upper;
  std::vector<Real> pivots;
};

// Elimination without pivoting at the current default precision.
Ldu factor(const Matrix& moments) {
  const int size = static_cast<int>(moments.size());
  Matrix a = square(size);
  for (int i = 0; i < size; ++i)
    for (int k = 0; k < size; ++k) a[i][k] = at_current_precision(moments[i][k]);
  Ldu f{square(size), square(size), std::vector<Real>(static_cast<std::size_t>(size))};
  for (int j = 0; j < size; ++j) {
    const Real pivot = a[j][j];
    if (!(pivot > 0)) throw SingularMoment("non-positive pivot at index " + std::to_string(j));
    f.pivots[j] = pivot;
    f.lower[j][j] = 1;
    f.upper[j][j] = 1;
    for (int i = j + 1; i < size; ++i) {
      f.lower[i][j] = a[i][j] / pivot;
      f.upper[j][i] = a[j][i] / pivot;
    }
    for (int i = j + 1; i < size; ++i)
      for (int k = j + 1; k < size; ++k) a[i][k] -= f.lower[i][j] * a[j][k];
  }
  return f;
}

}  // namespace

BiorthogonalSystem build_system(const WeightParams& params, int degree, const PrecisionContext& ctx) {
  ctx.validate();
  BiorthogonalSystem sys;
  sys.params = params;
  sys.degree = degree;
  sys.mantissa_bits = ctx.mantissa_bits;
  sys.moments = moment_matrix(params, degree, ctx);

  // Repeating the elimination 32 bits lower measures the rounding
  // amplification; the full-precision error is 2^-32 of that discrepancy.
  std::vector<Real> coarse;
  {
    PrecisionGuard low(ctx.mantissa_bits - 32);
    coarse = factor(sys.moments).pivots;
  }
  PrecisionGuard guard(ctx.mantissa_bits);
  const int size = degree + 1;
  Ldu f = factor(sys.moments);
  const double budget = -ctx.mantissa_bits / 4.0 * std::log2(10.0);
  for (int j = 0; j < size; ++j) {
    const double drift = log2(abs(coarse[j] / f.pivots[j] - 1)).convert_to<double>() - 32.0;
    if (drift > budget)
      throw SingularMoment("kappa " + std::to_string(j) + " carries only " + std::to_string(-drift) +
                           " correct bits");
  }
  sys.kappas = f.pivots;
  const Matrix& upper = f.upper;
  const Matrix& lower = f.lower;

  // P = L^{-1}; Q = (U^{-1})^T, i.e. the inverse of U^T.
  Matrix upper_t = square(size);
  for (int i = 0; i < size; ++i)
    for (int k = 0; k < size; ++k) upper_t[i][k] = upper[k][i];
  const Matrix p = unit_lower_inverse(lower);
  const Matrix q = unit_lower_inverse(upper_t);
  sys.p_coeffs.resize(size);
  sys.q_coeffs.resize(size);
  for (int j = 0; j < size; ++j) {
    sys.p_coeffs[j].assign(p[j].begin(), p[j].begin() + j + 1);
    sys.q_coeffs[j].assign(q[j].begin(), q[j].begin() + j + 1);
  }

  const auto [lo, hi] = std::minmax_element(sys.kappas.begin(), sys.kappas.end());
  sys.ill_conditioned = log2(*hi / *lo) > ctx.mantissa_bits / 2.0;
  return sys;
}

BiorthogonalSystem build_system_auto(const WeightParams& params, int degree, const PrecisionContext& ctx,
                                     int max_bits) {
  PrecisionContext c = ctx;
  c.mantissa_bits = std::max(ctx.mantissa_bits, 24 * degree);
  while (true) {
    try {
      return build_system(params, degree, c);
    } catch (const SingularMoment&) {
      if (2 * c.mantissa_bits > max_bits) throw;
      c.mantissa_bits *= 2;
    }
  }
}

Matrix pairing_matrix(const BiorthogonalSystem& sys, const PrecisionContext& ctx) {
  const auto size = static_cast<std::size_t>(sys.degree) + 1;
  // Horner on p_j loses about as many bits as the coefficients span; the
  // products are formed at twice the working precision.
  auto f = [&](const Real& x_in, std::vector<Real>& out) {
    PrecisionGuard wide(2 * ctx.mantissa_bits + 32);
    const Real x = at_current_precision(x_in);
    const Real w = sys.weight(x);
    const Real t = pow(x, sys.params.theta);
    std::vector<Real> qs(size);
    for (std::size_t k = 0; k < size; ++k) qs[k] = horner(sys.q_coeffs[k], t);
    for (std::size_t j = 0; j < size; ++j) {
      const Real pw = horner(sys.p_coeffs[j], x) * w;
      for (std::size_t k = 0; k < size; ++k) out[j * size + k] = pw * qs[k];
    }
  };
  const double spread = 0.5 * sys.degree * (1.0 + sys.params.theta.convert_to<double>());
  auto flat = quad_semiaxis_many(f, size * size, sys.params.alpha.convert_to<double>(),
                                 decay_scale(sys.params, spread), ctx);
  Matrix m(size);
  for (std::size_t j = 0; j < size; ++j)
    m[j].assign(flat.begin() + static_cast<long>(j * size), flat.begin() + static_cast<long>((j + 1) * size));
  return m;
}

Real kernel_n(const BiorthogonalSystem& sys, const Real& x, const Real& y) {
  const int n = sys.params.n;
  if (sys.degree < n - 1) throw DegreeTooLow("kernel needs degree >= n - 1");
  if (!(x > 0) || !(y > 0)) throw DomainError("kernel arguments must be positive");
  const Real t = pow(y, sys.params.theta);
  Real acc = 0;
  for (int j = 0; j < n; ++j) acc += horner(sys.p_coeffs[j], x) * horner(sys.q_coeffs[j], t) / sys.kappas[j];
  return sys.weight(x) * acc;
}

ComplexValue cauchy_transform_p(const BiorthogonalSystem& sys, int j, const ComplexValue& z, Side side,
                                const PrecisionContext& ctx) {
  check_index(sys, j);
  const Real& theta = sys.params.theta;
  if (!(abs(arg(z)) * theta < pi()) && !(z.re == 0 && z.im == 0))
    throw SectorError("Cp is defined for |arg z| < pi/theta");
  const Real phi = cauchy_ray(sys, z, side);
  PrecisionGuard guard(ctx.mantissa_bits + 16);
  const ComplexValue zt = pow(at_current_precision(z), at_current_precision(theta));
  const Real n(sys.params.n);
  auto f = [&](const ComplexValue& x) {
    const ComplexValue w = pow(x, sys.params.alpha) * exp(-(sys.params.potential.value(x) * n));
    return horner(sys.p_coeffs[j], x) * w / (pow(x, theta) - zt);
  };
  const Real scale = decay_scale(sys.params, 0.5 * j);
  const ComplexValue integral = quad_ray(f, phi, sys.params.alpha.convert_to<double>(), scale, ctx);
  return integral / ComplexValue(Real(0), 2 * pi());
}

ComplexValue cauchy_transform_q(const BiorthogonalSystem& sys, int j, const ComplexValue& z, Side side,
                                const PrecisionContext& ctx) {
  check_index(sys, j);
  const Real phi = cauchy_ray(sys, z, side);
  PrecisionGuard guard(ctx.mantissa_bits + 16);
  const ComplexValue zc = at_current_precision(z);
  const Real& theta = sys.params.theta;
  const Real n(sys.params.n);
  auto f = [&](const ComplexValue& x) {
    const ComplexValue w = pow(x, sys.params.alpha) * exp(-(sys.params.potential.value(x) * n));
    return horner(sys.q_coeffs[j], pow(x, theta)) * w / (x - zc);
  };
  const Real scale = decay_scale(sys.params, 0.5 * j * theta.convert_to<double>());
  const ComplexValue integral = quad_ray(f, phi, sys.params.alpha.convert_to<double>(), scale, ctx);
  return integral / ComplexValue(Real(0), 2 * pi());
}

}  // namespace mbh
