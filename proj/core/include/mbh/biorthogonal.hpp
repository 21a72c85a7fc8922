#pragma once

#include "mbh/complex.hpp"
#include "mbh/potential.hpp"
#include "mbh/side.hpp"

#include <string>
#include <vector>

namespace mbh {

// Weight x^alpha e^{-n V(x)} on (0, inf) together with the exponent theta of
// the second variable t = x^theta.
struct WeightParams {
  Real theta{1};
  Real alpha{0};
  int n = 1;
  Potential potential = Potential::linear();

  // Throws DomainError unless theta > 0, alpha > -1, n >= 1 and V grows.
  void validate() const;
};

// Monic families p_j (in x) and q_k (in t = x^theta), j, k <= degree, with
//   \int p_j(x) q_k(x^theta) x^alpha e^{-nV(x)} dx = kappa_j delta_{jk}.
// Row j of p_coeffs holds the coefficients of x^0 .. x^j; likewise q_coeffs in t.
struct BiorthogonalSystem {
  WeightParams params;
  int degree = 0;
  int mantissa_bits = 0;
  std::vector<std::vector<Real>> p_coeffs;
  std::vector<std::vector<Real>> q_coeffs;
  std::vector<Real> kappas;
  std::vector<std::vector<Real>> moments;  // M_{jk} = \int x^{j + theta k} w
  bool ill_conditioned = false;  // kappa_max / kappa_min > 2^{bits/2}

  Real p(int j, const Real& x) const;
  ComplexValue p(int j, const ComplexValue& z) const;
  // q_k evaluated at t (not at x).
  Real q(int k, const Real& t) const;
  ComplexValue q(int k, const ComplexValue& t) const;
  // x^alpha e^{-n V(x)}
  Real weight(const Real& x) const;

  // max_{j != k} |(P M Q^T)_{jk}| / kappa_max from the stored moments.
  Real moment_residual() const;
};

// \int_0^inf x^{j + theta k + alpha} e^{-nV(x)} dx by exp-sinh quadrature.
Real mixed_moment(int j, int k, const WeightParams& params, const PrecisionContext& ctx);
// All M_{jk}, j, k <= degree, from one pass over shared nodes.
std::vector<std::vector<Real>> moment_matrix(const WeightParams& params, int degree, const PrecisionContext& ctx);

// LDU factorisation of the moment matrix at ctx.mantissa_bits. Throws
// SingularMoment when a pivot is not positive or cancellation leaves fewer
// than 64 significant bits.
BiorthogonalSystem build_system(const WeightParams& params, int degree, const PrecisionContext& ctx);
// Starts at max(ctx.mantissa_bits, 24 degree) and doubles on SingularMoment
// up to max_bits.
BiorthogonalSystem build_system_auto(const WeightParams& params, int degree, const PrecisionContext& ctx,
                                     int max_bits = 8192);

// Direct quadrature of \int p_j q_k(x^theta) w for all j, k <= degree.
std::vector<std::vector<Real>> pairing_matrix(const BiorthogonalSystem& sys, const PrecisionContext& ctx);

// K_n(x, y) = x^alpha e^{-nV(x)} sum_{j<n} p_j(x) q_j(y^theta) / kappa_j with n = params.n.
// Throws DegreeTooLow when degree < n - 1.
Real kernel_n(const BiorthogonalSystem& sys, const Real& x, const Real& y);

// Cp_j(z) = (1/2 pi i) \int p_j(x) w(x) / (x^theta - z^theta) dx for z in the
// sector |arg z| < pi/theta. On (0, inf) pass Side::plus or Side::minus for the
// boundary values from above or below; Side::none there throws AxisError.
// Polynomial potentials only: the path is rotated off the axis away from z.
ComplexValue cauchy_transform_p(const BiorthogonalSystem& sys, int j, const ComplexValue& z, Side side,
                                const PrecisionContext& ctx);
// C~q_j(z) = (1/2 pi i) \int q_j(x^theta) w(x) / (x - z) dx, z off [0, inf).
ComplexValue cauchy_transform_q(const BiorthogonalSystem& sys, int j, const ComplexValue& z, Side side,
                                const PrecisionContext& ctx);

}  // namespace mbh
