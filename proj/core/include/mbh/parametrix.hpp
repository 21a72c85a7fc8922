#pragma once

#include "mbh/complex.hpp"
#include "mbh/fox.hpp"
#include "mbh/side.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace mbh {

// theta > 0, alpha > -1 and the ray opening gamma >= 0.
struct ModelParams {
  Real theta;
  Real alpha;
  Real gamma{0};
};

// Rays are oriented from 0 to infinity. On the real axis, where two formulas
// continue each other analytically, Side::plus picks the upper half-plane one.

// Integer offsets and fractional parts attached to an index ell:
//   R_lambda       =  theta ell/(theta+1) + m_ell                in (0, 1]
//   R_beta         = -theta ell/(theta+1) - n_ell                in (-theta/(theta+1), 1/(theta+1)]
//   R_tilde_beta   =  1/(theta+1) - theta ell/(theta+1) - n_tilde in (-theta/(theta+1), 1/(theta+1)]
//   R_tilde_lambda =  1/(theta+1) + theta ell/(theta+1) + m_tilde in (0, 1]
struct ParametrixIndex {
  long ell = 0;
  long m_ell = 0;
  long n_ell = 0;
  long m_tilde_ell = 0;
  long n_tilde_ell = 0;
  Real R_lambda;
  Real R_beta;
  Real R_tilde_lambda;
  Real R_tilde_beta;
};

ParametrixIndex index_for(long ell, const Real& theta);

// T(lambda) = -(alpha + 3/2)/(theta + 1) + lambda.
Real shift_T(const ModelParams& p, const Real& lambda);

// G jumps on arg z = +-(pi + theta gamma)/(theta + 1), H on +-(pi - theta gamma)/(theta + 1).
Real g_ray_angle(const ModelParams& p);
Real h_ray_angle(const ModelParams& p);

// G^model(z; lambda): the second-kind function in the right sector
// |arg z| < g_ray_angle and the first-kind function of -z rotated by
// +-theta pi/(theta+1) elsewhere.
class GModel {
 public:
  GModel(ModelParams p, Real lambda, PrecisionContext ctx);
  ComplexValue operator()(const ComplexValue& z, Side side = Side::none) const;
  const Real& lambda() const { return lambda_; }
  const Real& shift() const { return shift_; }

 private:
  ModelParams p_;
  Real lambda_;
  Real shift_;
  PrecisionContext ctx_;
  FoxI right_;
  FoxI left_;
};

// H^model(z; beta): the second-kind function of -z in the left sector
// |arg(-z)| < pi - h_ray_angle and the third-kind function rotated by
// -+pi/(theta+1) in the right sector.
class HModel {
 public:
  HModel(ModelParams p, Real beta, PrecisionContext ctx);
  ComplexValue operator()(const ComplexValue& z, Side side = Side::none) const;
  const Real& beta() const { return beta_; }
  const Real& shift() const { return shift_; }

 private:
  ModelParams p_;
  Real beta_;
  Real shift_;
  PrecisionContext ctx_;
  FoxI left_;
  FoxI right_;
};

enum class Family { plain, tilde };

// The four indexed families
//   G^(l)  = G^model(z; R_lambda(l)) z^l        H^(l)  = H^model(z; R_beta(l)) z^l
//   G~^(l) = H^model(z; R~_beta(l)) z^l         H~^(l) = G^model(z; R~_lambda(l)) z^l
// Model objects are cached per index; not thread-safe, use one per thread.
class ParametrixFamilies {
 public:
  ParametrixFamilies(ModelParams p, PrecisionContext ctx);

  ComplexValue G_ell(long ell, const ComplexValue& z, Side side = Side::none) const;
  ComplexValue H_ell(long ell, const ComplexValue& z, Side side = Side::none) const;
  ComplexValue G_tilde_ell(long ell, const ComplexValue& z, Side side = Side::none) const;
  ComplexValue H_tilde_ell(long ell, const ComplexValue& z, Side side = Side::none) const;

  // Family-generic accessors: the "G" and "H" slot of the chosen family.
  ComplexValue first(Family f, long ell, const ComplexValue& z, Side side = Side::none) const;
  ComplexValue second(Family f, long ell, const ComplexValue& z, Side side = Side::none) const;

  // Angles where some member of the family can jump, for arc quadrature.
  std::vector<Real> breakpoints() const;

  const ModelParams& params() const { return p_; }
  const PrecisionContext& context() const { return ctx_; }

 private:
  ModelParams p_;
  PrecisionContext ctx_;
  mutable std::map<long, std::unique_ptr<GModel>> g_plain_, g_tilde_;
  mutable std::map<long, std::unique_ptr<HModel>> h_plain_, h_tilde_;
};

// (1/2 pi i) \oint_{|z|=radius} S(z) f(z) dz/z, where S is H^(ell) for the
// plain family and H~^(ell) for the tilde family.
ComplexValue inner_product(const std::function<ComplexValue(const ComplexValue&)>& f, long ell, const Real& radius,
                           Family family, const ParametrixFamilies& families);

// Matrix M[j][k] = <G^(j), H^(-k)> (or the tilde pair) for 0 <= j, k < size,
// sharing quadrature nodes. Precision doubles when radius^{size} exceeds the
// working range.
std::vector<std::vector<ComplexValue>> biorthogonality_matrix(const ModelParams& p, Family family, int size,
                                                              const Real& radius, const PrecisionContext& ctx);

}  // namespace mbh
