#include "mbh/errors.hpp"
#include "mbh/parametrix.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mbh;

namespace {

PrecisionContext ctx_bits(int bits, double rel_tol = 0.0) {
  PrecisionContext c = PrecisionContext::with_bits(bits);
  c.rel_tol = rel_tol;
  return c;
}

double rel(const ComplexValue& got, const ComplexValue& want) {
  return (abs(got - want) / abs(want)).convert_to<double>();
}

double slope(const std::function<ComplexValue(const ComplexValue&)>& f, double phi, double r1, double r2) {
  const double l1 = std::log(abs(f(polar(Real(r1), Real(phi)))).convert_to<double>());
  const double l2 = std::log(abs(f(polar(Real(r2), Real(phi)))).convert_to<double>());
  return (l2 - l1) / std::log(r2 / r1);
}

}  // namespace

TEST(ParametrixIndex, DocumentedExamples) {
  PrecisionGuard g(128);
  const ParametrixIndex zero = index_for(0, Real(0.7));
  EXPECT_EQ(zero.m_ell, 1);
  EXPECT_EQ(zero.R_lambda, 1);
  EXPECT_EQ(zero.n_ell, 0);
  EXPECT_EQ(zero.R_beta, 0);
  const ParametrixIndex one = index_for(1, Real(1));
  EXPECT_EQ(one.m_ell, 0);
  EXPECT_EQ(one.R_lambda, Real(0.5));
}

TEST(ParametrixIndex, RangesAndMonotonicity) {
  PrecisionGuard g(128);
  for (double theta_d : {0.5, 1.0, std::sqrt(2.0), 2.0, 3.0, 0.3}) {
    const Real theta(theta_d);
    // Upper endpoints are attained; allow rounding there.
    const Real slack("1e-30");
    const Real lo = -theta / (theta + 1);
    const Real hi = 1 / (theta + 1) + slack;
    ParametrixIndex prev = index_for(-31, theta);
    for (long ell = -30; ell <= 30; ++ell) {
      const ParametrixIndex idx = index_for(ell, theta);
      const Real x = theta * ell / (theta + 1);
      EXPECT_GT(idx.R_lambda, 0);
      EXPECT_LE(idx.R_lambda, 1 + slack);
      EXPECT_GT(idx.R_tilde_lambda, 0);
      EXPECT_LE(idx.R_tilde_lambda, 1 + slack);
      EXPECT_GT(idx.R_beta, lo);
      EXPECT_LE(idx.R_beta, hi);
      EXPECT_GT(idx.R_tilde_beta, lo);
      EXPECT_LE(idx.R_tilde_beta, hi);
      EXPECT_LT(abs(idx.R_lambda - x - idx.m_ell).convert_to<double>(), 1e-30);
      EXPECT_LT(abs(idx.R_beta + x + idx.n_ell).convert_to<double>(), 1e-30);
      // ell + m_ell and -m_ell weakly increase; so do -n_ell and ell + n_ell.
      EXPECT_GE(idx.ell + idx.m_ell, prev.ell + prev.m_ell);
      EXPECT_GE(-idx.m_ell, -prev.m_ell);
      EXPECT_GE(-idx.n_ell, -prev.n_ell);
      EXPECT_GE(idx.ell + idx.n_ell, prev.ell + prev.n_ell);
      prev = idx;
    }
  }
}

TEST(ParametrixIndex, ShiftHasUnitSlope) {
  PrecisionGuard g(128);
  ModelParams p{Real(1.7), Real(0.4)};
  const Real t0 = shift_T(p, Real(0));
  EXPECT_LT(abs(t0 + (p.alpha + Real(1.5)) / (p.theta + 1)).convert_to<double>(), 1e-35);
  EXPECT_LT(abs(shift_T(p, Real(2.25)) - t0 - Real(2.25)).convert_to<double>(), 1e-35);
}

TEST(ParametrixModel, RaysRequireSideTags) {
  auto ctx = ctx_bits(96);
  PrecisionGuard g(96);
  ModelParams p{Real(2), Real(0.1)};
  GModel gm(p, Real(0.5), ctx);
  HModel hm(p, Real(0.2), ctx);
  const ComplexValue on_g = polar(Real(1), g_ray_angle(p));
  const ComplexValue on_h = polar(Real(1), -h_ray_angle(p));
  EXPECT_THROW(gm(on_g), RayError);
  EXPECT_THROW(hm(on_h), RayError);
  EXPECT_NO_THROW(gm(on_g, Side::plus));
  EXPECT_NO_THROW(hm(on_h, Side::minus));
  EXPECT_THROW(gm(ComplexValue(Real(0))), DomainError);
}

TEST(ParametrixModel, GJumpOnBothRays) {
  auto ctx = ctx_bits(128);
  PrecisionGuard g(128);
  const Real p2 = 2 * pi();
  // At gamma = 0 the rotated point sits on the opposite ray; the side tag
  // picks the sector it occupies for gamma > 0.
  for (double gamma : {0.0, 0.05}) {
    for (auto [theta_d, alpha_d, lambda_d] : {std::tuple{std::sqrt(2.0), 0.3, 1.0}, {0.5, -0.4, 0.35}, {3.0, 1.3, 0.8}}) {
      ModelParams p{Real(theta_d), Real(alpha_d), Real(gamma)};
      const Real theta(theta_d);
      const Real lambda(lambda_d);
      GModel gm(p, lambda, ctx);
      const Real ray = g_ray_angle(p);
      const Real phase = (2 * Real(alpha_d) + 3) / (theta + 1) * pi();
      const Real turn = p2 / (theta + 1);
      for (double r : {0.4, 1.0, 2.5}) {
        const ComplexValue up = polar(Real(r), ray);
        const ComplexValue jump_up = gm(up, Side::plus) - gm(up, Side::minus);
        const ComplexValue want_up = -(expi(-phase + lambda * p2) * gm(up * expi(-turn), Side::plus));
        EXPECT_LT(abs(jump_up - want_up).convert_to<double>() / abs(gm(up, Side::minus)).convert_to<double>(),
                  10 * ctx.tolerance())
            << theta_d << " " << gamma << " " << r;
        const ComplexValue down = polar(Real(r), -ray);
        const ComplexValue jump_down = gm(down, Side::plus) - gm(down, Side::minus);
        const ComplexValue want_down = expi(phase - lambda * p2) * gm(down * expi(turn), Side::minus);
        EXPECT_LT(abs(jump_down - want_down).convert_to<double>() / abs(gm(down, Side::plus)).convert_to<double>(),
                  10 * ctx.tolerance())
            << theta_d << " " << gamma << " " << r;
      }
    }
  }
}

TEST(ParametrixModel, HJumpOnBothRays) {
  auto ctx = ctx_bits(128);
  PrecisionGuard g(128);
  const Real p2 = 2 * pi();
  for (double gamma : {0.0, 0.05}) {
    for (auto [theta_d, alpha_d, beta_d] : {std::tuple{std::sqrt(2.0), 0.3, 0.1}, {0.5, -0.4, -0.2}, {3.0, 1.3, 0.2}}) {
      ModelParams p{Real(theta_d), Real(alpha_d), Real(gamma)};
      const Real theta(theta_d);
      const Real beta(beta_d);
      HModel hm(p, beta, ctx);
      const Real ray = h_ray_angle(p);
      const Real phase = (2 * Real(alpha_d) + 3) / (theta + 1) * pi();
      const Real turn = p2 / (theta + 1);
      for (double r : {0.4, 1.0, 2.5}) {
        const ComplexValue up = polar(Real(r), ray);
        const ComplexValue jump_up = hm(up, Side::plus) - hm(up, Side::minus);
        const ComplexValue want_up = -(expi(phase - beta * p2) * hm(up * expi(-turn), Side::minus));
        EXPECT_LT(abs(jump_up - want_up).convert_to<double>() / abs(hm(up, Side::minus)).convert_to<double>(),
                  10 * ctx.tolerance())
            << theta_d << " " << gamma << " " << r;
        const ComplexValue down = polar(Real(r), -ray);
        const ComplexValue jump_down = hm(down, Side::plus) - hm(down, Side::minus);
        const ComplexValue want_down = expi(-phase + beta * p2) * hm(down * expi(turn), Side::plus);
        EXPECT_LT(abs(jump_down - want_down).convert_to<double>() / abs(hm(down, Side::plus)).convert_to<double>(),
                  10 * ctx.tolerance())
            << theta_d << " " << gamma << " " << r;
      }
    }
  }
}

TEST(ParametrixModel, BranchFormulasAgreeOnTheAxis) {
  // H switches formula on the positive axis, G on the negative axis; both are
  // analytic there.
  auto ctx = ctx_bits(128);
  PrecisionGuard g(128);
  for (double theta_d : {0.5, std::sqrt(2.0), 2.0}) {
    ModelParams p{Real(theta_d), Real(0.3)};
    HModel hm(p, Real(0.15), ctx);
    GModel gm(p, Real(0.6), ctx);
    for (double x : {0.3, 0.8, 2.0}) {
      const ComplexValue pos{Real(x)};
      EXPECT_LT(rel(hm(pos, Side::plus), hm(pos, Side::minus)), 10 * ctx.tolerance()) << theta_d << " " << x;
      const ComplexValue neg{Real(-x)};
      EXPECT_LT(rel(gm(neg, Side::plus), gm(neg, Side::minus)), 10 * ctx.tolerance()) << theta_d << " " << x;
    }
  }
}

TEST(ParametrixModel, GContinuousAcrossPositiveAxis) {
  // One-sided values at x e^{+-i eps} differ only by the first-order term
  // 2 i eps x G'(x); the remainder is O(eps^3).
  auto ctx = ctx_bits(128);
  PrecisionGuard g(128);
  ModelParams p{Real(std::sqrt(2.0)), Real(0.3)};
  GModel gm(p, Real(1), ctx);
  const Real x("0.8");
  const Real eps("1e-6");
  const ComplexValue above = gm(polar(x, eps));
  const ComplexValue below = gm(polar(x, -eps));
  const Real h("1e-20");
  const ComplexValue derivative = (gm(ComplexValue(x + h)) - gm(ComplexValue(x - h))) / (2 * h);
  const ComplexValue first_order = derivative * ComplexValue(Real(0), 2 * eps * x);
  EXPECT_LT(abs(above - below - first_order).convert_to<double>(), 1e-15);
}

TEST(ParametrixModel, SmallArgumentExponentOfG) {
  // theta = 1, alpha = -0.4, lambda = 1: T = 0.45 > 1/4, exponent 2 (1/2 - T) = 0.1.
  auto ctx = ctx_bits(96);
  PrecisionGuard g(96);
  ModelParams p{Real(1), Real(-0.4)};
  GModel gm(p, Real(1), ctx);
  const double T = shift_T(p, Real(1)).convert_to<double>();
  const double expected = 2 * (0.5 - T);
  auto f = [&](const ComplexValue& z) { return gm(z); };
  for (double phi : {0.3, -2.6}) EXPECT_NEAR(slope(f, phi, 1e-4, 1e-3) / expected, 1.0, 0.05) << phi;
}

TEST(ParametrixFamilies, LeadingExponentsPerSector) {
  auto ctx = ctx_bits(96);
  PrecisionGuard g(96);
  const double theta = 1.0;
  const double alpha = -0.4;
  ParametrixFamilies fam({Real(theta), Real(alpha)}, ctx);
  for (long ell = 0; ell <= 3; ++ell) {
    const ParametrixIndex idx = index_for(ell, Real(theta));
    const double left_g = 0.5 + (alpha + 2) / theta - (theta + 1) * idx.m_ell / theta;
    const double right_g = std::min(left_g, theta - alpha - 0.5 + (theta + 1) * (ell + idx.m_ell - 1));
    auto g_fn = [&](const ComplexValue& z) { return fam.G_ell(ell, z); };
    EXPECT_NEAR(slope(g_fn, 2.6, 1e-4, 1e-3), left_g, 0.02) << "G left " << ell;
    EXPECT_NEAR(slope(g_fn, 0.4, 1e-4, 1e-3), right_g, 0.02) << "G right " << ell;

    const double right_h = alpha + 1.5 + (theta + 1) * (ell + idx.n_ell);
    const double left_h = std::min(0.5 - (alpha + 1) / theta - (theta + 1) * idx.n_ell / theta, right_h);
    auto h_fn = [&](const ComplexValue& z) { return fam.H_ell(ell, z); };
    EXPECT_NEAR(slope(h_fn, 0.4, 1e-4, 1e-3), right_h, 0.02) << "H right " << ell;
    EXPECT_NEAR(slope(h_fn, 2.6, 1e-4, 1e-3), left_h, 0.02) << "H left " << ell;
  }
}

TEST(ParametrixFamilies, AsymptoticNormalization) {
  auto ctx = ctx_bits(128);
  PrecisionGuard g(128);
  ParametrixFamilies fam({Real(std::sqrt(2.0)), Real(0.3)}, ctx);
  const ComplexValue z = polar(Real(50), Real("0.3"));
  for (long ell : {0L, 1L, 4L}) {
    const ComplexValue zl = ipow(z, -ell);
    const ComplexValue g_norm = exp(z) * fam.G_ell(ell, z) * zl;
    const ComplexValue h_norm = exp(-z) * fam.H_ell(ell, z) * zl;
    EXPECT_LE(abs(g_norm - ComplexValue(Real(1))).convert_to<double>(), 10.0 / 50) << ell;
    EXPECT_LE(abs(h_norm - ComplexValue(Real(1))).convert_to<double>(), 10.0 / 50) << ell;
  }
}

TEST(ParametrixFamilies, CircleBoundUniformInIndex) {
  // |G^(l)| / r^l = |G^model(.; R_lambda(l))| is bounded by the sup over all
  // lambda in (0, 1].
  auto ctx = ctx_bits(96);
  PrecisionGuard g(96);
  ModelParams p{Real(std::sqrt(2.0)), Real(0.3)};
  ParametrixFamilies fam(p, ctx);
  const Real r(2);
  std::vector<ComplexValue> circle;
  for (int i = 0; i < 48; ++i) circle.push_back(polar(r, pi() * (2 * i + 1) / 48 - pi()));
  double envelope = 0;
  for (int i = 1; i <= 40; ++i) {
    GModel gm(p, Real(i) / 40, ctx);
    for (const auto& z : circle) envelope = std::max(envelope, abs(gm(z)).convert_to<double>());
  }
  for (long ell = -4; ell <= 8; ++ell) {
    double m = 0;
    for (const auto& z : circle) m = std::max(m, (abs(fam.G_ell(ell, z)) / pow(r, ell)).convert_to<double>());
    EXPECT_LE(m, envelope * 1.05) << ell;
    EXPECT_GT(m, 0) << ell;
  }
}

TEST(ParametrixInnerProduct, BiorthogonalityBothFamilies) {
  auto ctx = ctx_bits(256, 1e-14);
  PrecisionGuard g(256);
  ModelParams p{sqrt(Real(2)), Real(0.3)};
  for (auto family : {Family::plain, Family::tilde}) {
    auto m = biorthogonality_matrix(p, family, 7, Real(1), ctx);
    for (int j = 0; j < 7; ++j)
      for (int k = 0; k < 7; ++k)
        EXPECT_LT(abs(m[j][k] - ComplexValue(Real(j == k ? 1 : 0))).convert_to<double>(), 1e-10)
            << static_cast<int>(family) << " " << j << " " << k;
  }
}

TEST(ParametrixInnerProduct, RadiusAndGammaIndependence) {
  auto ctx = ctx_bits(128, 1e-14);
  PrecisionGuard g(128);
  ModelParams p0{Real(0.5), Real(1.3)};
  ModelParams p1{Real(0.5), Real(1.3), Real(0.05)};
  ParametrixFamilies f0(p0, ctx);
  ParametrixFamilies f1(p1, ctx);
  for (auto family : {Family::plain, Family::tilde}) {
    for (auto [j, k] : {std::pair{2L, 2L}, {3L, 1L}, {1L, 3L}, {0L, 0L}}) {
      auto fj0 = [&](const ComplexValue& z) { return f0.first(family, j, z); };
      auto fj1 = [&](const ComplexValue& z) { return f1.first(family, j, z); };
      const ComplexValue ref = inner_product(fj0, -k, Real(1), family, f0);
      EXPECT_LT(abs(ref - ComplexValue(Real(j == k ? 1 : 0))).convert_to<double>(), 1e-10);
      for (double radius : {0.5, 2.0})
        EXPECT_LT(abs(inner_product(fj0, -k, Real(radius), family, f0) - ref).convert_to<double>(), 1e-10)
            << j << " " << k << " " << radius;
      EXPECT_LT(abs(inner_product(fj1, -k, Real(1), family, f1) - ref).convert_to<double>(), 1e-10) << j << " " << k;
    }
  }
}

TEST(ParametrixInnerProduct, ExpansionCoefficientsOfAMixture) {
  // f = 2 G^(0) - 0.5 G^(3) is recovered from its inner products.
  auto ctx = ctx_bits(128, 1e-14);
  PrecisionGuard g(128);
  ParametrixFamilies fam({Real(2), Real(0)}, ctx);
  auto f = [&](const ComplexValue& z) { return fam.G_ell(0, z) * Real(2) - fam.G_ell(3, z) * Real(0.5); };
  const double want[] = {2, 0, 0, -0.5, 0};
  for (long k = 0; k < 5; ++k)
    EXPECT_LT(abs(inner_product(f, -k, Real(1.2), Family::plain, fam) - ComplexValue(Real(want[k]))).convert_to<double>(),
              1e-10)
        << k;
}
