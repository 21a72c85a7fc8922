#pragma once

#include "mbh/biorthogonal.hpp"
#include "mbh/equilibrium.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mbh {

// K(x, y) = theta \int_0^1 J_{(alpha+1)/theta, 1/theta}(x u) J_{alpha+1, theta}((y u)^theta) u^alpha du.
// Integer theta: Gauss-Jacobi in u with weight u^alpha, order doubled until
// stable. Otherwise the integrand has u^theta powers and the exact double
// series sum_{i,j} a_i b_j / (alpha + 1 + i + theta j) is summed instead.
Real limit_kernel(const Real& x, const Real& y, const Real& alpha, const Real& theta, const PrecisionContext& ctx);
// The double series for any theta; exposed for cross-checks.
Real limit_kernel_series(const Real& x, const Real& y, const Real& alpha, const Real& theta,
                         const PrecisionContext& ctx);

// k(x, y) = theta^alpha J_{(alpha+1)/theta, 1/theta}(theta x) J_{alpha+1, theta}((theta y)^theta).
Real k_product(const Real& x, const Real& y, const Real& alpha, const Real& theta, const PrecisionContext& ctx);

// Supplies the degree-n system for each n; the CLI plugs a cache in here.
using SystemProvider = std::function<BiorthogonalSystem(const WeightParams&, int degree, const PrecisionContext&)>;

struct Experiment {
  EquilibriumData eq;
  Real theta{1};  // must agree with eq.theta
  Real alpha{0};
  PrecisionContext ctx;
  SystemProvider systems;  // empty selects build_system_auto

  WeightParams weight(int n) const;
  BiorthogonalSystem system(int n, int bits) const;
};

struct EdgeConstants {
  double rho = 0.0;
  double c = 0.0;
  double ell = 0.0;
  double g0_re = 0.0;
  double gtilde0_re = 0.0;
  double m_theta = 0.0;
};
EdgeConstants edge_constants(const EquilibriumData& eq);

// C_n = sqrt(2 pi) c^{(2(alpha+1) - theta)/(2(theta+1))} (rho n)^{(alpha+1)/theta - 1/2} e^{n Re g(0)}
Real scale_constant_p(const EdgeConstants& k, const Real& alpha, const Real& theta, int n);
// C~_n = sqrt(2 pi) c^{(alpha + 1/2)/(1 + 1/theta)} (theta rho n)^{alpha + 1/2} e^{n Re g~(0)}
Real scale_constant_q(const EdgeConstants& k, const Real& alpha, const Real& theta, int n);
// 2 pi theta^{-1/2} c^{alpha+1} e^{n ell}
Real kappa_prediction(const EdgeConstants& k, const Real& alpha, const Real& theta, int n);

struct ConvergenceReport {
  std::string target;  // "p", "q", "kappa" or "kernel"
  std::string label;   // free-form detail, e.g. point and convention
  std::vector<int> n_values;
  std::vector<double> errors;
  std::vector<double> ratios;  // kappa ratio or scaled value; NaN when unused
  std::vector<int> bits_used;
  std::vector<double> scale_constants;  // C_n, C~_n or the kappa prediction
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;
  EdgeConstants constants;

  bool strictly_decreasing(std::size_t burn_in = 0) const;
  // |fitted - predicted| <= tol |predicted|
  bool rate_within(double tol) const;
};

// Least-squares slope of log error against log n over the last ceil(half) points.
double fit_rate(const std::vector<int>& n_values, const std::vector<double>& errors);

// Default sample set: 12 points in |z| <= 2 off the negative axis.
std::vector<ComplexValue> default_z_samples();

// sup_z |p_n(z/(rho n)^{1+1/theta}) / ((-1)^n C_n) - J_{(alpha+1)/theta, 1/theta}(theta z)|.
ConvergenceReport verify_pn_asymptotics(const Experiment& ex, const std::vector<int>& n_list,
                                        const std::vector<ComplexValue>& z_samples);
// sup_z |q_n(z^theta/(rho n)^{theta+1}) / ((-1)^n C~_n) - J_{alpha+1, theta}((theta z)^theta)|.
ConvergenceReport verify_qn_asymptotics(const Experiment& ex, const std::vector<int>& n_list,
                                        const std::vector<ComplexValue>& z_samples);
// ratio_n = kappa_n / prediction, error |ratio_n - 1|.
ConvergenceReport verify_kappa(const Experiment& ex, const std::vector<int>& n_list);

enum class KernelScaling {
  with_theta,     // theta^{-1} s^{-1} K_n(x/(theta s), y/(theta s)),  s = (rho n)^{1+1/theta}
  without_theta,  // theta^{-1} s^{-1} K_n(x/s, y/s)
};
std::string to_string(KernelScaling s);

struct KernelPoint {
  double x = 0.0;
  double y = 0.0;
};
// One report per point and scaling; the target is x^alpha K(x, y) in both, the
// x^alpha coming from the weight carried by K_n.
std::vector<ConvergenceReport> verify_kernel_limit(const Experiment& ex, const std::vector<int>& n_list,
                                                   const std::vector<KernelPoint>& points);

// Jump of Y = (p_n, Cp_n) on the positive axis and its decay at infinity.
struct RhCheck {
  std::vector<double> points;
  std::vector<double> jump_residuals;  // |Cp_+ - Cp_- - p_n w / (theta x^{theta-1})|
  double tail_radius = 0.0;
  ComplexValue tail_value;  // 2 pi i (z^theta)^{n+1} Cp_n(z) / kappa_n
};
RhCheck check_rh_problem(const BiorthogonalSystem& sys, const std::vector<double>& points, double tail_radius,
                         const PrecisionContext& ctx);

}  // namespace mbh
