#pragma once

#include "mbh/complex.hpp"

namespace mbh {

// Principal branch of log Gamma, with log_gamma(v+1) = log_gamma(v) + log(v).
ComplexValue log_gamma(const ComplexValue& v, const PrecisionContext& ctx);

// Gamma(v); reflection is used for Re v < 1/2.
ComplexValue gamma(const ComplexValue& v, const PrecisionContext& ctx);

// 1/Gamma(v), an entire function; exactly zero at non-positive integers.
ComplexValue rgamma(const ComplexValue& v, const PrecisionContext& ctx);

// Real 1/Gamma(x) at the current default precision, zero at the poles.
Real rgamma(const Real& x);

}  // namespace mbh
