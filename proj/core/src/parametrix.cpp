#include "mbh/parametrix.hpp"

#include "mbh/errors.hpp"
#include "mbh/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mbh {
namespace {

int current_bits() { return static_cast<int>(std::ceil(Real::default_precision() / 0.30103)); }

// ceil(y), treating values within a few ulps of an integer as that integer.
long snapped_ceil(const Real& y) {
  const Real nearest = round(y);
  const Real eps = ldexp(Real(1), -(current_bits() - 12)) * mbh::max(Real(1), abs(y));
  if (abs(y - nearest) <= eps) return nearest.convert_to<long>();
  return ceil(y).convert_to<long>();
}

Real ray_tolerance(const PrecisionContext& ctx) { return ldexp(Real(1), -(ctx.mantissa_bits - 16)); }

void validate(const ModelParams& p) {
  if (!(p.theta > 0)) throw DomainError("parametrix: theta must be positive");
  if (!(p.alpha > -1)) throw DomainError("parametrix: alpha must exceed -1");
  if (p.gamma < 0) throw DomainError("parametrix: gamma must be non-negative");
}

}  // namespace

ParametrixIndex index_for(long ell, const Real& theta) {
  if (!(theta > 0)) throw DomainError("index_for: theta must be positive");
  const Real t = at_current_precision(theta);
  const Real x = t * ell / (t + 1);
  const Real c2 = 1 / (t + 1);
  ParametrixIndex r;
  r.ell = ell;
  r.m_ell = 1 - snapped_ceil(x);
  r.n_ell = snapped_ceil(-x - c2);
  r.n_tilde_ell = snapped_ceil(-x);
  r.m_tilde_ell = 1 - snapped_ceil(c2 + x);
  r.R_lambda = x + r.m_ell;
  r.R_beta = -x - r.n_ell;
  r.R_tilde_beta = c2 - x - r.n_tilde_ell;
  r.R_tilde_lambda = c2 + x + r.m_tilde_ell;
  return r;
}

Real shift_T(const ModelParams& p, const Real& lambda) { return lambda - (p.alpha + Real(1.5)) / (p.theta + 1); }

Real g_ray_angle(const ModelParams& p) { return (pi() + p.theta * p.gamma) / (p.theta + 1); }
Real h_ray_angle(const ModelParams& p) { return (pi() - p.theta * p.gamma) / (p.theta + 1); }

GModel::GModel(ModelParams p, Real lambda, PrecisionContext ctx)
    : p_(std::move(p)),
      lambda_(std::move(lambda)),
      shift_(shift_T(p_, lambda_)),
      ctx_(ctx),
      right_(FoxKind::second, {p_.theta, shift_}, ctx),
      left_(FoxKind::first, {p_.theta, shift_}, ctx, FoxMethod::series) {
  validate(p_);
}

ComplexValue GModel::operator()(const ComplexValue& z, Side side) const {
  PrecisionGuard guard(ctx_.mantissa_bits);
  const ComplexValue w = at_current_precision(z);
  if (w.re == 0 && w.im == 0) throw DomainError("G_model: z = 0");
  const Real theta = at_current_precision(p_.theta);
  const Real T = at_current_precision(shift_);
  const Real p = pi();
  const Real phi = arg(w);
  const Real ray = g_ray_angle(p_);
  const Real eps = ray_tolerance(ctx_);

  enum class Branch { right, left_upper, left_lower } branch;
  if (abs(phi - ray) <= eps) {
    if (side == Side::none) throw RayError("G_model: z on the upper discontinuity ray");
    branch = side == Side::plus ? Branch::left_upper : Branch::right;
  } else if (abs(phi + ray) <= eps) {
    if (side == Side::none) throw RayError("G_model: z on the lower discontinuity ray");
    branch = side == Side::plus ? Branch::right : Branch::left_lower;
  } else if (abs(phi) < ray) {
    branch = Branch::right;
  } else if (phi == p) {
    branch = side == Side::minus ? Branch::left_lower : Branch::left_upper;
  } else {
    branch = phi > 0 ? Branch::left_upper : Branch::left_lower;
  }

  const Real K = sqrt(2 * p) * pow(theta, T) / sqrt(theta + 1);
  const Real turn = theta * p / (theta + 1);
  switch (branch) {
    case Branch::right:
      return right_(w) * (K / (2 * p));
    case Branch::left_upper:
      return ComplexValue(Real(0), -K) * expi(T * p) * left_(-w * expi(turn));
    case Branch::left_lower:
      return ComplexValue(Real(0), K) * expi(-T * p) * left_(-w * expi(-turn));
  }
  return {};
}

HModel::HModel(ModelParams p, Real beta, PrecisionContext ctx)
    : p_(std::move(p)),
      beta_(std::move(beta)),
      shift_(shift_T(p_, beta_)),
      ctx_(ctx),
      left_(FoxKind::second, {p_.theta, -shift_}, ctx),
      right_(FoxKind::third, {p_.theta, -shift_}, ctx, FoxMethod::series) {
  validate(p_);
}

ComplexValue HModel::operator()(const ComplexValue& z, Side side) const {
  PrecisionGuard guard(ctx_.mantissa_bits);
  const ComplexValue w = at_current_precision(z);
  if (w.re == 0 && w.im == 0) throw DomainError("H_model: z = 0");
  const Real theta = at_current_precision(p_.theta);
  const Real T = at_current_precision(shift_);
  const Real p = pi();
  const Real phi = arg(w);
  const Real ray = h_ray_angle(p_);
  const Real eps = ray_tolerance(ctx_);

  enum class Branch { left, right_upper, right_lower } branch;
  if (abs(phi - ray) <= eps) {
    if (side == Side::none) throw RayError("H_model: z on the upper discontinuity ray");
    branch = side == Side::plus ? Branch::left : Branch::right_upper;
  } else if (abs(phi + ray) <= eps) {
    if (side == Side::none) throw RayError("H_model: z on the lower discontinuity ray");
    branch = side == Side::plus ? Branch::right_lower : Branch::left;
  } else if (abs(phi) < ray) {
    if (phi == 0) branch = side == Side::minus ? Branch::right_lower : Branch::right_upper;
    else branch = phi > 0 ? Branch::right_upper : Branch::right_lower;
  } else {
    branch = Branch::left;
  }

  const Real K = sqrt(2 * p) * pow(theta, -T) / sqrt(theta + 1);
  const Real turn = p / (theta + 1);
  switch (branch) {
    case Branch::left:
      return left_(-w) * (K / (2 * p));
    case Branch::right_lower:
      return expi(T * p) * right_(w * expi(turn)) * K;
    case Branch::right_upper:
      return expi(-T * p) * right_(w * expi(-turn)) * K;
  }
  return {};
}

ParametrixFamilies::ParametrixFamilies(ModelParams p, PrecisionContext ctx) : p_(std::move(p)), ctx_(ctx) {
  validate(p_);
  ctx_.validate();
}

namespace {

template <class Model>
const Model& cached(std::map<long, std::unique_ptr<Model>>& cache, long ell, const ModelParams& p,
                    const PrecisionContext& ctx, Real ParametrixIndex::*field) {
  auto it = cache.find(ell);
  if (it == cache.end()) {
    PrecisionGuard guard(ctx.mantissa_bits);
    const ParametrixIndex idx = index_for(ell, p.theta);
    it = cache.emplace(ell, std::make_unique<Model>(p, idx.*field, ctx)).first;
  }
  return *it->second;
}

ComplexValue times_power(ComplexValue v, const ComplexValue& z, long ell) { return v * ipow(z, ell); }

}  // namespace

ComplexValue ParametrixFamilies::G_ell(long ell, const ComplexValue& z, Side side) const {
  const GModel& g = cached(g_plain_, ell, p_, ctx_, &ParametrixIndex::R_lambda);
  PrecisionGuard guard(ctx_.mantissa_bits);
  return times_power(g(z, side), at_current_precision(z), ell);
}

ComplexValue ParametrixFamilies::H_ell(long ell, const ComplexValue& z, Side side) const {
  const HModel& h = cached(h_plain_, ell, p_, ctx_, &ParametrixIndex::R_beta);
  PrecisionGuard guard(ctx_.mantissa_bits);
  return times_power(h(z, side), at_current_precision(z), ell);
}

ComplexValue ParametrixFamilies::G_tilde_ell(long ell, const ComplexValue& z, Side side) const {
  const HModel& h = cached(h_tilde_, ell, p_, ctx_, &ParametrixIndex::R_tilde_beta);
  PrecisionGuard guard(ctx_.mantissa_bits);
  return times_power(h(z, side), at_current_precision(z), ell);
}

ComplexValue ParametrixFamilies::H_tilde_ell(long ell, const ComplexValue& z, Side side) const {
  const GModel& g = cached(g_tilde_, ell, p_, ctx_, &ParametrixIndex::R_tilde_lambda);
  PrecisionGuard guard(ctx_.mantissa_bits);
  return times_power(g(z, side), at_current_precision(z), ell);
}

ComplexValue ParametrixFamilies::first(Family f, long ell, const ComplexValue& z, Side side) const {
  return f == Family::plain ? G_ell(ell, z, side) : G_tilde_ell(ell, z, side);
}

ComplexValue ParametrixFamilies::second(Family f, long ell, const ComplexValue& z, Side side) const {
  return f == Family::plain ? H_ell(ell, z, side) : H_tilde_ell(ell, z, side);
}

std::vector<Real> ParametrixFamilies::breakpoints() const {
  PrecisionGuard guard(ctx_.mantissa_bits);
  const Real g = g_ray_angle(p_);
  const Real h = h_ray_angle(p_);
  std::vector<Real> b{-g, -h, Real(0), h, g};
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

ComplexValue inner_product(const std::function<ComplexValue(const ComplexValue&)>& f, long ell, const Real& radius,
                           Family family, const ParametrixFamilies& families) {
  auto integrand = [&](const ComplexValue& z) { return families.second(family, ell, z) * f(z); };
  return quad_circle_arcs(integrand, radius, families.breakpoints(), families.context());
}

std::vector<std::vector<ComplexValue>> biorthogonality_matrix(const ModelParams& p, Family family, int size,
                                                              const Real& radius, const PrecisionContext& ctx) {
  if (size <= 0) throw DomainError("biorthogonality_matrix: size must be positive");
  PrecisionContext work = ctx;
  const double spread = std::fabs(std::log2(radius.convert_to<double>())) * size;
  if (spread > ctx.mantissa_bits / 4.0) work.mantissa_bits = 2 * ctx.mantissa_bits;
  ParametrixFamilies families(p, work);
  const std::size_t n = static_cast<std::size_t>(size);
  std::vector<ComplexValue> g(n), h(n);
  auto fill = [&](const ComplexValue& z, std::vector<ComplexValue>& out) {
    for (std::size_t j = 0; j < n; ++j) {
      g[j] = families.first(family, static_cast<long>(j), z);
      h[j] = families.second(family, -static_cast<long>(j), z);
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[j * n + k] = g[j] * h[k];
  };
  std::vector<ComplexValue> flat = quad_circle_arcs(fill, n * n, radius, families.breakpoints(), work);
  std::vector<std::vector<ComplexValue>> m(n, std::vector<ComplexValue>(n));
  PrecisionGuard guard(ctx.mantissa_bits);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) m[j][k] = at_current_precision(flat[j * n + k]);
  return m;
}

}  // namespace mbh
