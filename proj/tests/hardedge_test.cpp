#include "mbh/errors.hpp"
#include "mbh/hardedge.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mbh;

namespace {

double d(const Real& x) { return x.convert_to<double>(); }

PrecisionContext bits(int b) { return PrecisionContext::with_bits(b); }

// Plain double series; adequate for the small arguments used here.
double wright_double(double a1, double a2, double x) {
  double sum = 0;
  double power = 1;
  for (int j = 0; j < 200; ++j) {
    if (j > 0) power *= -x / j;
    const double arg = a1 + j * a2;
    if (arg <= 0 && arg == std::floor(arg)) continue;
    sum += power / std::tgamma(arg);
  }
  return sum;
}

double bessel_prime(double nu, double t) { return nu / t * std::cyl_bessel_j(nu, t) - std::cyl_bessel_j(nu + 1, t); }

// Classical hard-edge Bessel kernel in the variables s, t > 0.
double bessel_kernel(double alpha, double s, double t) {
  const double rs = std::sqrt(s);
  const double rt = std::sqrt(t);
  const double num = std::cyl_bessel_j(alpha, rs) * rt * bessel_prime(alpha, rt) -
                     rs * bessel_prime(alpha, rs) * std::cyl_bessel_j(alpha, rt);
  return num / (2 * (s - t));
}

const EquilibriumData& linear_eq(double theta) {
  static const EquilibriumData one = solve_equilibrium(Potential::linear(), 1.0);
  static const EquilibriumData two = solve_equilibrium(Potential::linear(), 2.0);
  return theta == 1.0 ? one : two;
}

Experiment experiment(double theta, double alpha) {
  Experiment ex;
  ex.eq = linear_eq(theta);
  ex.theta = Real(theta);
  ex.alpha = Real(alpha);
  ex.ctx = bits(128);
  return ex;
}

}  // namespace

TEST(LimitKernel, ValueAtTheOrigin) {
  PrecisionGuard g(128);
  for (double theta : {0.5, 1.0, 2.0, std::numbers::sqrt2}) {
    for (double alpha : {-0.4, 0.0, 1.3}) {
      const Real th(theta);
      const Real al(alpha);
      const Real expected = th / ((al + 1) * tgamma((al + 1) / th) * tgamma(al + 1));
      const Real got = limit_kernel(Real(0), Real(0), al, th, bits(128));
      EXPECT_LT(d(abs(got / expected - 1)), 1e-30) << theta << " " << alpha;
    }
  }
}

TEST(LimitKernel, ReducesToTheBesselKernelAtThetaOne) {
  const double xs[] = {0.3, 0.9, 1.7, 2.6};
  const double ys[] = {0.5, 1.2, 2.1, 3.3};
  for (double alpha : {0.0, 0.7}) {
    for (double x : xs) {
      for (double y : ys) {
        const double got = d(limit_kernel(Real(x), Real(y), Real(alpha), Real(1), bits(128)));
        const double expected = std::pow(x * y, -alpha / 2) * 4 * bessel_kernel(alpha, 4 * x, 4 * y);
        EXPECT_NEAR(got, expected, 1e-8 * std::fabs(expected)) << x << " " << y;
      }
    }
  }
}

TEST(LimitKernel, SeriesAgreesWithGaussJacobi) {
  PrecisionGuard g(160);
  for (double theta : {1.0, 2.0, 3.0}) {
    for (auto [x, y] : {std::pair{0.4, 2.5}, {3.0, 1.0}, {6.0, 5.0}}) {
      const Real a = limit_kernel(Real(x), Real(y), Real(0.3), Real(theta), bits(160));
      const Real b = limit_kernel_series(Real(x), Real(y), Real(0.3), Real(theta), bits(160));
      EXPECT_LT(d(abs(a - b)), 1e-35 * std::max(1.0, d(abs(a)))) << theta << " " << x << " " << y;
    }
  }
}

TEST(LimitKernel, NonIntegerThetaAgainstDirectQuadrature) {
  boost::math::quadrature::tanh_sinh<double> rule;
  for (double theta : {0.5, std::numbers::sqrt2, 2.5}) {
    const double alpha = 0.5;
    for (auto [x, y] : {std::pair{0.7, 1.1}, {2.0, 0.4}}) {
      const double expected = theta * rule.integrate(
                                          [&](double u) {
                                            return wright_double((alpha + 1) / theta, 1 / theta, x * u) *
                                                   wright_double(alpha + 1, theta, std::pow(y * u, theta)) *
                                                   std::pow(u, alpha);
                                          },
                                          0.0, 1.0, 1e-12);
      const double got = d(limit_kernel(Real(x), Real(y), Real(alpha), Real(theta), bits(128)));
      EXPECT_NEAR(got, expected, 1e-10) << theta << " " << x << " " << y;
    }
  }
}

TEST(LimitKernel, RejectsBadArguments) {
  EXPECT_THROW(limit_kernel(Real(-1), Real(1), Real(0), Real(1), bits(64)), DomainError);
  EXPECT_THROW(limit_kernel(Real(1), Real(1), Real(-1), Real(1), bits(64)), DomainError);
  EXPECT_THROW(limit_kernel_series(Real(1), Real(1), Real(0), Real(0), bits(64)), DomainError);
}

TEST(KProduct, OriginAndBesselSquare) {
  PrecisionGuard g(128);
  const Real th(2), al(0.5);
  const Real expected = pow(th, al) / (tgamma((al + 1) / th) * tgamma(al + 1));
  EXPECT_LT(d(abs(k_product(Real(0), Real(0), al, th, bits(128)) - expected)), 1e-30);
  const double j0 = std::cyl_bessel_j(0.0, 2.0);
  EXPECT_NEAR(d(k_product(Real(1), Real(1), Real(0), Real(1), bits(128))), j0 * j0, 1e-15);
}

TEST(KProduct, RadialIntegralGivesTheLimitKernel) {
  boost::math::quadrature::tanh_sinh<double> rule;
  for (double theta : {1.0, 2.0, 0.5}) {
    const double alpha = 0.3;
    const double x = 0.8;
    const double y = 1.4;
    const double integral = rule.integrate(
        [&](double u) {
          return std::pow(u, alpha) * d(k_product(Real(u * x), Real(u * y), Real(alpha), Real(theta), bits(64)));
        },
        0.0, 1.0, 1e-12);
    const double expected =
        std::pow(theta, 1 + alpha) * d(limit_kernel(Real(theta * x), Real(theta * y), Real(alpha), Real(theta), bits(96)));
    EXPECT_NEAR(theta * theta * integral, expected, 1e-10 * std::fabs(expected)) << theta;
  }
}

TEST(Reports, FitRateRecoversPowerLaws) {
  const std::vector<int> ns{4, 8, 16, 32, 64};
  std::vector<double> errs;
  for (int n : ns) errs.push_back(3.0 * std::pow(n, -0.75));
  EXPECT_NEAR(fit_rate(ns, errs), -0.75, 1e-12);
  // Only the last half enters the fit.
  errs[0] = 100;
  EXPECT_NEAR(fit_rate(ns, errs), -0.75, 1e-12);
  EXPECT_TRUE(std::isnan(fit_rate({4}, {1.0})));

  ConvergenceReport r;
  r.errors = {1.0, 0.5, 0.6, 0.2};
  EXPECT_FALSE(r.strictly_decreasing());
  EXPECT_TRUE(r.strictly_decreasing(2));
  r.fitted_rate = -0.5;
  r.predicted_rate = -0.6;
  EXPECT_TRUE(r.rate_within(0.2));
  EXPECT_FALSE(r.rate_within(0.1));
}

TEST(Reports, DefaultSamplesAvoidTheNegativeAxis) {
  const auto z = default_z_samples();
  EXPECT_EQ(z.size(), 12u);
  for (const auto& p : z) {
    EXPECT_LE(d(abs(p)), 2.0 + 1e-12);
    EXPECT_LT(std::fabs(d(arg(p))), 2.0);
  }
}

TEST(ScaleConstants, MatchStirlingForLaguerre) {
  // V = x, theta = 1: p_n(0) = (-1)^n Gamma(n + alpha + 1) / (Gamma(alpha + 1) n^n).
  const EdgeConstants k = edge_constants(linear_eq(1.0));
  PrecisionGuard g(128);
  const Real alpha(0.5);
  double last = 1e300;
  for (int n : {8, 32, 128}) {
    const Real p0 = tgamma(Real(n) + alpha + 1) / pow(Real(n), n);
    const double ratio = d(p0 / scale_constant_p(k, alpha, Real(1), n));
    const double err = std::fabs(ratio - 1);
    EXPECT_LT(err, last);
    EXPECT_LT(err, 2.0 / n);
    last = err;
  }
  const double kappa_ratio = d(Real(2) * std::numbers::pi / kappa_prediction(k, Real(0), Real(1), 10));
  EXPECT_NEAR(kappa_ratio, std::exp(20.0), 1e-3 * std::exp(20.0));
}

TEST(Verification, KappaTracksTheLaguerreOracle) {
  const Experiment ex = experiment(1.0, 0.0);
  const std::vector<int> ns{6, 10, 14};
  const ConvergenceReport r = verify_kappa(ex, ns);
  ASSERT_EQ(r.errors.size(), ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    const double exact = std::exp(2 * std::lgamma(n + 1.0) - (2 * n + 1) * std::log(n) + 2 * n) / (2 * std::numbers::pi);
    EXPECT_NEAR(r.ratios[i], exact, 1e-6);
  }
  EXPECT_TRUE(r.strictly_decreasing());
  EXPECT_NEAR(r.predicted_rate, -2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.target, "kappa");
}

TEST(Verification, PolynomialsApproachWrightFunctions) {
  const Experiment ex = experiment(1.0, 0.5);
  const std::vector<int> ns{4, 8, 12};
  const ConvergenceReport p = verify_pn_asymptotics(ex, ns, default_z_samples());
  const ConvergenceReport q = verify_qn_asymptotics(ex, ns, default_z_samples());
  EXPECT_TRUE(p.strictly_decreasing());
  EXPECT_TRUE(q.strictly_decreasing());
  EXPECT_LT(p.errors.back(), 0.2);
  // At theta = 1 the two families coincide.
  for (std::size_t i = 0; i < ns.size(); ++i) EXPECT_NEAR(p.errors[i], q.errors[i], 1e-12);
  for (int b : p.bits_used) EXPECT_GE(b, 128);
  EXPECT_NEAR(p.predicted_rate, -1.0 / 3.0, 1e-12);
}

TEST(Verification, KernelLimitAndConventions) {
  const Experiment ex = experiment(2.0, 0.5);
  const std::vector<int> ns{4, 8, 12};
  const auto reports = verify_kernel_limit(ex, ns, {{1.0, 2.0}});
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NE(reports[0].label.find("with_theta"), std::string::npos);
  EXPECT_NE(reports[1].label.find("without_theta"), std::string::npos);
  EXPECT_TRUE(reports[0].strictly_decreasing());
  EXPECT_LT(reports[0].errors.back(), 0.02);
  EXPECT_THROW(verify_kernel_limit(ex, ns, {{0.0, 1.0}}), DomainError);
  EXPECT_THROW(verify_kappa(ex, {8, 4}), DomainError);
  EXPECT_THROW(verify_kappa(ex, {}), DomainError);
}

TEST(Verification, JumpAndTailOfTheCauchyColumn) {
  const Experiment ex = experiment(1.0, 0.0);
  const BiorthogonalSystem sys = ex.system(6, 128);
  PrecisionContext ctx = bits(128);
  ctx.rel_tol = 1e-20;
  const RhCheck rh = check_rh_problem(sys, {0.3, 1.0, 2.5}, 1000.0, ctx);
  ASSERT_EQ(rh.jump_residuals.size(), 3u);
  for (double r : rh.jump_residuals) EXPECT_LT(r, 1e-15);
  // The transform as normalised here tends to -kappa_n.
  EXPECT_NEAR(d(rh.tail_value.re), -1.0, 0.02);
  EXPECT_NEAR(d(rh.tail_value.im), 0.0, 0.02);
}
