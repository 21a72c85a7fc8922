#pragma once

#include "mbh/complex.hpp"

#include <map>
#include <memory>
#include <vector>

namespace mbh {

// J_{a1,a2}(x) = sum_j (-x)^j / (j! Gamma(a1 + j a2)).
struct WrightParams {
  Real a1;
  Real a2;  // > 0
};

// Evaluator with coefficient tables cached per working precision. Not
// thread-safe; use one instance per thread.
class WrightBessel {
 public:
  WrightBessel(WrightParams params, PrecisionContext ctx);

  ComplexValue operator()(const ComplexValue& x) const;
  const WrightParams& params() const { return params_; }

 private:
  struct Table {
    std::vector<Real> coeff;  // 1/(j! Gamma(a1 + j a2))
  };
  const std::vector<Real>& coefficients(int bits, std::size_t count) const;
  double log2_term(std::size_t j, double log2x) const;

  WrightParams params_;
  PrecisionContext ctx_;
  double a1_ = 0.0;
  double a2_ = 0.0;
  mutable std::map<int, Table> tables_;
};

ComplexValue wright_bessel(const WrightParams& params, const ComplexValue& x, const PrecisionContext& ctx);

}  // namespace mbh
