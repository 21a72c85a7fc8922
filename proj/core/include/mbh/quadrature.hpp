#pragma once

#include "mbh/complex.hpp"
#include "mbh/errors.hpp"

#include <functional>
#include <vector>

namespace mbh {

inline constexpr long kMaxQuadratureNodes = 1L << 20;

// (1/2 pi i) \oint_{|z|=radius} f(z) dz/z by the equispaced trapezoid rule.
// Node counts double from ctx.quad_points_circle until two successive
// refinements agree to ctx.tolerance() relative to the mean of |f|.
ComplexValue quad_circle(const std::function<ComplexValue(const ComplexValue&)>& f, const Real& radius,
                         const PrecisionContext& ctx);

// Same integral for a function that is analytic on each arc between the given
// angles (ascending, inside (-pi, pi]) but may jump across them. Gauss-Legendre
// on every arc, order doubled until stable. `f` fills one value per component.
using VectorCircleFn = std::function<void(const ComplexValue& z, std::vector<ComplexValue>& out)>;
std::vector<ComplexValue> quad_circle_arcs(const VectorCircleFn& f, std::size_t components, const Real& radius,
                                           std::vector<Real> breakpoints, const PrecisionContext& ctx);
ComplexValue quad_circle_arcs(const std::function<ComplexValue(const ComplexValue&)>& f, const Real& radius,
                              std::vector<Real> breakpoints, const PrecisionContext& ctx);

// Gauss rules at the given binary precision, cached.
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};
// Legendre nodes on [-1, 1].
const GaussRule& gauss_legendre(int order, int bits);
// Nodes on [0, 1] for the weight u^alpha.
GaussRule gauss_jacobi_unit(int order, const Real& alpha, int bits);

// Integrand on (0, inf) with endpoint behaviour x^alpha at 0.
struct SemiAxisIntegrand {
  double alpha = 0.0;
  std::function<Real(const Real&)> f;
};

// Exp-sinh rule x = s exp(pi/2 sinh t) with nested step halving.
Real quad_semiaxis(const SemiAxisIntegrand& f, const Real& decay_scale, const PrecisionContext& ctx);

// Vector form: every component is integrated on the same nodes; each has to
// converge relative to its own magnitude.
using VectorSemiAxisFn = std::function<void(const Real& x, std::vector<Real>& out)>;
std::vector<Real> quad_semiaxis_many(const VectorSemiAxisFn& f, std::size_t components, double alpha,
                                     const Real& decay_scale, const PrecisionContext& ctx);

// Complex integrand along the ray x = e^{i phi} s, s in (0, inf); returns
// \int f(x) dx along that ray.
using RayFn = std::function<ComplexValue(const ComplexValue& x)>;
ComplexValue quad_ray(const RayFn& f, const Real& phi, double alpha, const Real& decay_scale,
                      const PrecisionContext& ctx);

}  // namespace mbh
