#pragma once

#include "mbh/potential.hpp"
#include "mbh/side.hpp"

#include <complex>
#include <memory>
#include <utility>
#include <vector>

namespace mbh {

// Equilibrium measure psi(x) dx on [0, b] of the two-kernel logarithmic energy
// with external field V. Everything here is double precision.
//
// The density is carried in the graded variable t in [0, 1],
//   x = b sin(pi t / 2)^{1 + 1/theta},   psi(x) dx = nu(t) dt,
// where nu is a Legendre series in 2t - 1. The map absorbs the x^{-1/(theta+1)}
// hard edge and the square-root soft edge, so nu is smooth with nu(1) = 0.
struct EquilibriumData {
  double theta = 1.0;
  Potential potential;

  std::vector<double> grid;  // increasing, ends at b
  std::vector<double> psi;   // density on grid

  double b = 0.0;
  double d1 = 0.0;  // psi ~ d1 x^{-1/(theta+1)} at 0
  double d2 = 0.0;  // psi ~ d2 (b - x)^{1/2} at b
  double c = 0.0;
  double rho = 0.0;
  double varrho = 0.0;
  double m_theta = 0.0;
  double lagrange_ell = 0.0;
  double g0_re = 0.0;       // Re g_+(0)
  double gtilde0_re = 0.0;  // Re g~_+(0)
  double edge_exponent = 0.0;  // fitted log-slope of psi near 0

  std::vector<double> nu_legendre;

  double x_of_t(double t) const;
  double t_of_x(double x) const;
  double dx_dt(double t) const;
  double nu(double t) const;
  double density(double x) const;  // 0 outside (0, b)
  double mass_above(double x) const;  // \int_x^b psi

  // { \int log|x - y| psi(y) dy, \int log|x^theta - y^theta| psi(y) dy } for x >= 0.
  std::pair<double, double> log_potentials(double x) const;
  // Left side of the Euler-Lagrange relation minus ell: zero on [0, b], negative beyond.
  double el_residual(double x) const;

  // Gauss-Legendre rule on [0, 1] (u = 1 - t kept separately) and nu on its nodes.
  struct Rule {
    std::vector<double> t, u, w, nu;
  };
  std::shared_ptr<const Rule> rule;
};

// Collocation solve with grid_size Legendre modes; see EquilibriumData.
// Throws NotOneCut when the sufficient condition fails or the computed
// density dips below 1e-8 of its maximum inside the support, FitFailure when
// the hard-edge exponent misses -1/(theta+1) by more than 10%.
EquilibriumData solve_equilibrium(const Potential& v, double theta, int grid_size = 48);

// g(z) = \int log(z - y) psi(y) dy, cut (-inf, b]; on the cut pass the side.
std::complex<double> g_eval(const EquilibriumData& eq, std::complex<double> z, Side side = Side::none);
// g~(z) = \int log(z^theta - y^theta) psi(y) dy on |arg z| <= pi/theta, cut [0, b].
// The polar form reaches the whole sheet, including arg z = +-pi/theta.
std::complex<double> gtilde_eval(const EquilibriumData& eq, std::complex<double> z, Side side = Side::none);
std::complex<double> gtilde_eval_polar(const EquilibriumData& eq, double r, double arg, Side side = Side::none);
// phi = g + g~ - V - ell.
std::complex<double> phi_eval(const EquilibriumData& eq, std::complex<double> z, Side side = Side::none);

// J_c(s) = c (s + 1) ((s + 1)/s)^{1/theta}, normalised so J_c(s) ~ c s at infinity.
// J_c(-1) = 0 is returned as the limit; the rest of [-1, 0] throws CutError.
std::complex<double> jc_map(std::complex<double> s, double c, double theta);

// Brute-force minimiser of the discretised energy over the probability
// simplex: weights at midpoints of a graded grid on [0, xmax], accelerated
// projected gradient. Coarse; used as an independent cross-check.
struct SimplexEquilibrium {
  std::vector<double> nodes;
  std::vector<double> widths;
  std::vector<double> weights;
  double b = 0.0;  // right edge of the last cell carrying weight
  double lagrange_ell = 0.0;
  double energy = 0.0;
  int iterations = 0;
};
SimplexEquilibrium minimize_energy_on_simplex(const Potential& v, double theta, double xmax, int cells,
                                              int iterations = 20000);

}  // namespace mbh
