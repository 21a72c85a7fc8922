#pragma once

#include "mbh/complex.hpp"
#include "mbh/wright.hpp"

#include <map>
#include <optional>
#include <vector>

namespace mbh {

// The three Mellin-Barnes integrals (1/2 pi i) \int_L Gamma-ratio(v) u^v dv with
// u = u_scale(theta) z, c1 = theta/(theta+1), c2 = 1/(theta+1):
//   first : Gamma(1/2 - a - c1 v) / Gamma(1 - a + c2 v)
//   second: Gamma(1/2 - a - c1 v) Gamma(a - c2 v)
//   third : Gamma(a - c2 v) / Gamma(1/2 + a + c1 v)
// L starts and ends at +inf and encircles all poles clockwise.
enum class FoxKind { first = 1, second = 2, third = 3 };

struct FoxIParams {
  Real theta;
  Real a;
};

enum class FoxMethod { mellin_barnes, series };

// (theta/(theta+1))^{theta/(theta+1)} (1/(theta+1))^{1/(theta+1)}
Real u_scale(const Real& theta);

// |z| from which fox_I_asymptotic accepts arguments.
inline constexpr double kAsymptoticThreshold = 20.0;
// Angular margin kept away from the boundaries of the kind 1 and 3 sectors.
inline constexpr double kAsymptoticSectorMargin = 0.05;

// Evaluator that caches contour nodes and Gamma values per working precision.
// Not thread-safe; use one instance per thread.
class FoxI {
 public:
  FoxI(FoxKind kind, FoxIParams params, PrecisionContext ctx, FoxMethod method = FoxMethod::mellin_barnes);

  ComplexValue operator()(const ComplexValue& z) const;

  // Numerical contour integral. `extra_levels` halves the step that many more
  // times than the tolerance requires (used for refinement checks).
  ComplexValue mellin_barnes(const ComplexValue& z, int extra_levels = 0) const;
  // Wright series for the first and third kinds, residue double series for the
  // second kind (DomainError when two pole lattices nearly collide).
  ComplexValue series(const ComplexValue& z) const;

  FoxKind kind() const { return kind_; }
  const FoxIParams& params() const { return params_; }

 private:
  struct Nodes {
    Real h;
    Real x0;
    Real width;
    std::vector<ComplexValue> pos, neg;  // weights W_k for k >= 0 and k <= -1
    std::vector<double> lpos, lneg;      // log2 |W_k|
  };
  Nodes& nodes(int bits, int level) const;
  void extend(Nodes& n, int bits, bool positive, std::size_t count) const;
  ComplexValue gamma_factor(const ComplexValue& v, const PrecisionContext& work) const;
  ComplexValue second_kind_residues(const ComplexValue& z) const;
  void check_argument(const ComplexValue& z) const;

  FoxKind kind_;
  FoxIParams params_;
  PrecisionContext ctx_;
  FoxMethod method_;
  double theta_d_ = 0.0;
  double a_d_ = 0.0;
  double pole_min_ = 0.0;
  mutable std::map<std::pair<int, int>, Nodes> cache_;
  mutable std::optional<WrightBessel> wright_;
};

ComplexValue fox_I(FoxKind kind, const FoxIParams& params, const ComplexValue& z, const PrecisionContext& ctx,
                   FoxMethod method = FoxMethod::mellin_barnes);

// Leading exponential behaviour for |z| >= kAsymptoticThreshold:
//   second: sqrt(2 pi (theta+1)) theta^{-a} e^{-z},          |arg z| < pi
//   first : sqrt(theta+1)/(sqrt(2 pi) theta^a) e^{+-(1/2-a) pi i} e^{-z e^{+-pi i/(theta+1)}},
//           +-arg z in (0, theta pi/(theta+1))
//   third : sqrt(theta+1)/(sqrt(2 pi) theta^a) e^{+-a pi i} e^{-z e^{+-theta pi i/(theta+1)}},
//           +-arg z in (0, pi/(theta+1))
// Throws SectorError when arg z is outside (or within the margin of) the sector.
ComplexValue fox_I_asymptotic(FoxKind kind, const FoxIParams& params, const ComplexValue& z,
                              const PrecisionContext& ctx);

}  // namespace mbh
