// Acceptance runner: `acceptance <1..10> [cli-path]` prints one PASS/FAIL line
// and exits non-zero on FAIL.

#include "mbh/biorthogonal.hpp"
#include "mbh/errors.hpp"
#include "mbh/fox.hpp"
#include "mbh/hardedge.hpp"
#include "mbh/parametrix.hpp"
#include "mbh/wright.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace mbh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double d(const Real& x) { return x.convert_to<double>(); }

PrecisionContext bits(int b, double rel_tol = 0.0) {
  PrecisionContext c = PrecisionContext::with_bits(b);
  c.rel_tol = rel_tol;
  return c;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + num(x);
  return "[" + s + "]";
}

// Builds each (params, degree, bits) once per process.
SystemProvider memo() {
  auto store = std::make_shared<std::map<std::string, BiorthogonalSystem>>();
  return [store](const WeightParams& w, int degree, const PrecisionContext& ctx) {
    const std::string key = w.potential.descriptor() + to_decimal(w.theta) + to_decimal(w.alpha) + "|" +
                            std::to_string(w.n) + "|" + std::to_string(degree) + "|" +
                            std::to_string(ctx.mantissa_bits);
    auto it = store->find(key);
    if (it == store->end()) it = store->emplace(key, build_system_auto(w, degree, ctx)).first;
    return it->second;
  };
}

Experiment linear_experiment(double theta, double alpha, int bits_) {
  Experiment ex;
  ex.eq = solve_equilibrium(Potential::linear(), theta);
  ex.theta = Real(theta);
  ex.alpha = Real(alpha);
  ex.ctx = bits(bits_);
  ex.systems = memo();
  return ex;
}

Outcome parametrix_biorthogonality() {
  const auto ctx = bits(256, 1e-14);
  PrecisionGuard g(256);
  double worst = 0;
  double spread = 0;
  for (double theta : {0.5, 1.0, std::numbers::sqrt2, 2.0}) {
    for (double alpha : {-0.4, 0.0, 1.3}) {
      const ModelParams p{Real(theta), Real(alpha)};
      for (Family f : {Family::plain, Family::tilde}) {
        std::vector<std::vector<std::vector<ComplexValue>>> mats;
        for (double r : {0.5, 1.0, 2.0}) {
          mats.push_back(biorthogonality_matrix(p, f, 7, Real(r), ctx));
          for (int j = 0; j < 7; ++j)
            for (int k = 0; k < 7; ++k)
              worst = std::max(worst, d(abs(mats.back()[j][k] - ComplexValue(Real(j == k ? 1 : 0)))));
        }
        for (std::size_t m = 1; m < mats.size(); ++m)
          for (int j = 0; j < 7; ++j)
            for (int k = 0; k < 7; ++k) spread = std::max(spread, d(abs(mats[m][j][k] - mats[0][j][k])));
      }
    }
  }
  return {worst <= 1e-10 && spread <= 1e-10,
          "max |<G,H> - delta| = " + num(worst) + ", radius spread = " + num(spread) + " (limit 1e-10)"};
}

Outcome split_relations() {
  const auto ctx = bits(128);
  PrecisionGuard g(128);
  const Real p = pi();
  double worst = 0;
  int count = 0;
  for (double theta_d : {0.6, std::numbers::sqrt2, 2.5}) {
    for (double a_d : {-0.35, 0.1, 0.4}) {
      const Real theta(theta_d);
      const Real a(a_d);
      FoxI first(FoxKind::first, {theta, a}, ctx);
      FoxI second(FoxKind::second, {theta, a}, ctx);
      FoxI third(FoxKind::third, {theta, a}, ctx);
      const Real turn1 = p / (theta + 1);
      const Real turn3 = p * theta / (theta + 1);
      // Both rotated arguments of the second kind stay on its principal sheet.
      const Real reach = p - max(turn1, turn3);
      for (double r : {0.3, 1.0, 3.0}) {
        for (int k = 0; k < 8; ++k) {
          const ComplexValue z = polar(Real(r), reach * Real(0.95) * (Real(2 * k - 7) / 7));
          const ComplexValue up1 = second(z * expi(turn1));
          const ComplexValue down1 = second(z * expi(-turn1));
          const ComplexValue up3 = second(z * expi(turn3));
          const ComplexValue down3 = second(z * expi(-turn3));
          const ComplexValue s1 = expi(-(a - Real(0.5)) * p) * up1 + expi((a - Real(0.5)) * p) * down1;
          const ComplexValue s3 = expi(a * p) * up3 + expi(-a * p) * down3;
          const ComplexValue i1 = first(z) * (2 * p);
          const ComplexValue i3 = third(z) * (2 * p);
          const Real scale1 = max(abs(i1), max(abs(up1), abs(down1)));
          const Real scale3 = max(abs(i3), max(abs(up3), abs(down3)));
          worst = std::max({worst, d(abs(s1 - i1) / scale1), d(abs(s3 - i3) / scale3)});
          ++count;
        }
      }
    }
  }
  return {worst <= 1e-10, "max scaled residual " + num(worst) + " over " + std::to_string(count) +
                              " points x 2 relations (limit 1e-10)"};
}

Outcome special_function_reduction() {
  const auto ctx = bits(128);
  PrecisionGuard g(128);
  const Real wright = wright_bessel({Real(1), Real(1)}, ComplexValue(Real(1)), ctx).re;
  const Real bessel = boost::math::cyl_bessel_j(Real(0), Real(2));
  const double wright_err = d(abs(wright - bessel));

  // LK(x, y) = 4 K_Bessel(4x, 4y) at alpha = 0.
  auto bessel_kernel = [](double s, double t) {
    const double rs = std::sqrt(s), rt = std::sqrt(t);
    const double j0s = boost::math::cyl_bessel_j(0, rs), j0t = boost::math::cyl_bessel_j(0, rt);
    const double j1s = boost::math::cyl_bessel_j(1, rs), j1t = boost::math::cyl_bessel_j(1, rt);
    // J_0' = -J_1
    return (j0s * rt * -j1t - rs * -j1s * j0t) / (2 * (s - t));
  };
  double kernel_err = 0;
  for (double x : {0.3, 0.9, 1.7, 2.6}) {
    for (double y : {0.5, 1.2, 2.1, 3.3}) {
      const double expected = 4 * bessel_kernel(4 * x, 4 * y);
      const double got = d(limit_kernel(Real(x), Real(y), Real(0), Real(1), ctx));
      kernel_err = std::max(kernel_err, std::fabs(got - expected) / std::fabs(expected));
    }
  }
  return {wright_err <= 1e-20 && kernel_err <= 1e-8,
          "|J_{1,1}(1) - J0(2)| = " + num(wright_err) + " (limit 1e-20), kernel rel err " + num(kernel_err) +
              " on 4x4 grid (limit 1e-8)"};
}

double el_by_quadrature(const EquilibriumData& eq, double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double th = eq.theta;
  auto kernel = [&](double y, double diff) {
    const double tilde = std::pow(x, th) * std::fabs(std::expm1(th * std::log1p(diff / x)));
    return (std::log(std::fabs(diff)) + std::log(tilde)) * eq.density(y);
  };
  auto left = [&](double y, double yc) { return kernel(y, y > x / 2 ? -yc : y - x); };
  auto right = [&](double y, double yc) { return kernel(y, y < (x + eq.b) / 2 ? -yc : y - x); };
  const double total = ts.integrate(left, 0.0, x, 1e-13) + ts.integrate(right, x, eq.b, 1e-13);
  return total - eq.potential.value(x) - eq.lagrange_ell;
}

Outcome equilibrium_oracle() {
  const EquilibriumData eq = solve_equilibrium(Potential::linear(), 1.0);
  const double b_err = std::fabs(eq.b / 4 - 1);
  const double d1_err = std::fabs(eq.d1 * std::numbers::pi - 1);
  const double rho_err = std::fabs(eq.rho - 1);
  double el = 0;
  for (int i = 1; i <= 40; ++i) el = std::max(el, std::fabs(el_by_quadrature(eq, eq.b * i / 41.0)));
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mass = ts.integrate([&](double x) { return eq.density(x); }, 0.0, eq.b, 1e-14);
  const bool ok = b_err <= 0.005 && d1_err <= 0.02 && rho_err <= 0.02 && el <= 1e-6 && std::fabs(mass - 1) <= 1e-10;
  return {ok, "b rel err " + num(b_err) + ", d1 rel err " + num(d1_err) + ", rho rel err " + num(rho_err) +
                  ", EL residual " + num(el) + ", |mass - 1| " + num(std::fabs(mass - 1))};
}

Outcome biorthogonality_by_construction() {
  const auto ctx = bits(256, 1e-28);
  double worst = 0;
  double kappa_err = 0;
  for (double theta : {1.0, 2.0}) {
    for (int n : {1, 4, 8, 12, 16}) {
      WeightParams w;
      w.theta = Real(theta);
      w.alpha = Real(0.5);
      w.n = n;
      const BiorthogonalSystem sys = build_system_auto(w, 16, ctx);
      PrecisionGuard g(sys.mantissa_bits);
      const auto pairing = pairing_matrix(sys, ctx);
      Real kmax = 0;
      for (const auto& k : sys.kappas) kmax = max(kmax, k);
      for (int j = 0; j <= 16; ++j)
        for (int k = 0; k <= 16; ++k)
          if (j != k) worst = std::max(worst, d(abs(pairing[j][k]) / kmax));
      if (theta == 1.0) {
        for (int j = 0; j <= 16; ++j) {
          const Real oracle =
              tgamma(Real(j + 1)) * tgamma(Real(j) + w.alpha + 1) / pow(Real(n), Real(2 * j + 1) + w.alpha);
          kappa_err = std::max(kappa_err, d(abs(sys.kappas[j] / oracle - 1)));
        }
      }
    }
  }
  return {worst <= 1e-15 && kappa_err <= 1e-12, "max off-diagonal / kappa_max " + num(worst) +
                                                     " (limit 1e-15), Laguerre kappa rel err " + num(kappa_err) +
                                                     " (limit 1e-12)"};
}

Outcome kappa_asymptotics() {
  const Experiment ex = linear_experiment(1.0, 0.0, 256);
  std::vector<int> ns;
  for (int n = 6; n <= 24; ++n) ns.push_back(n);
  const ConvergenceReport r = verify_kappa(ex, ns);
  const bool monotone = r.strictly_decreasing();
  const double last = r.errors.back();
  const bool rate = r.rate_within(0.35);
  return {monotone && last <= 0.25 && rate,
          std::string("monotone ") + (monotone ? "yes" : "no") + ", |ratio - 1| at n=24 " + num(last) +
              ", fitted rate " + num(r.fitted_rate) + " vs predicted " + num(r.predicted_rate) + " (35% band)"};
}

Outcome polynomial_asymptotics() {
  const std::vector<int> ns{8, 12, 16, 24};
  bool ok = true;
  std::string detail;
  for (double theta : {1.0, 2.0}) {
    const Experiment ex = linear_experiment(theta, 0.0, 512);
    for (const ConvergenceReport& r :
         {verify_pn_asymptotics(ex, ns, default_z_samples()), verify_qn_asymptotics(ex, ns, default_z_samples())}) {
      const bool dec = r.strictly_decreasing();
      const bool rate = r.rate_within(0.35);
      ok = ok && dec && rate;
      detail += (detail.empty() ? "" : "; ") + r.target + "(theta=" + num(theta) + ") errors " + join(r.errors) +
                " decreasing " + (dec ? "yes" : "no") + " rate " + num(r.fitted_rate) + " vs " +
                num(r.predicted_rate);
    }
  }
  return {ok, detail};
}

Outcome kernel_limit() {
  const std::vector<int> ns{8, 16, 24};
  const std::vector<KernelPoint> points{{0.7, 1.1}, {1.0, 2.0}, {2.0, 0.5}};
  bool ok = true;
  std::string detail = "theta=1:";
  for (const auto& r : verify_kernel_limit(linear_experiment(1.0, 0.0, 256), ns, points)) {
    if (r.label.find("without_theta") != std::string::npos) continue;
    ok = ok && r.strictly_decreasing();
    detail += " " + join(r.errors);
  }
  detail += "; theta=2:";
  const auto dual = verify_kernel_limit(linear_experiment(2.0, 0.0, 256), ns, points);
  for (const auto& r : dual) {
    bool finite = r.errors.size() == ns.size();
    for (double e : r.errors) finite = finite && std::isfinite(e);
    ok = ok && finite;
    detail += " " + r.label.substr(r.label.rfind('=') + 1) + join(r.errors);
  }
  ok = ok && dual.size() == 2 * points.size();
  return {ok, detail};
}

Outcome riemann_hilbert() {
  WeightParams w;
  w.theta = Real(1);
  w.alpha = Real(0);
  w.n = 6;
  const BiorthogonalSystem sys = build_system_auto(w, 6, bits(128));
  const RhCheck rh = check_rh_problem(sys, {0.3, 1.0, 2.5}, 1000.0, bits(128, 1e-20));
  double jump = 0;
  for (double r : rh.jump_residuals) jump = std::max(jump, r);
  // tail_value already carries the division by kappa_n.
  const double tail_err = d(abs(rh.tail_value - ComplexValue(Real(1))));
  return {jump <= 1e-8 && tail_err <= 0.01,
          "max jump residual " + num(jump) + " (limit 1e-8), 2 pi i (z^theta)^{n+1} Cp_n / kappa_n = (" +
              num(d(rh.tail_value.re)) + ", " + num(d(rh.tail_value.im)) + ") at |z|=1000, distance to 1 " +
              num(tail_err) + " (limit 0.01)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "path to the command line tool not given"};
  const fs::path dir = fs::temp_directory_path() / "mbh_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({"theta": 1, "alpha": 0, "potential": "linear", "n": [8, 12, 16, 24],)"
                                     << R"( "target": "kappa", "bits": 256})";
  std::vector<std::string> csvs;
  for (const char* extra : {"", "", " --no-cache"}) {
    const std::string cmd = "\"" + cli + "\" --config \"" + (dir / "config.json").string() + "\" verify --out \"" +
                            (dir / "out").string() + "\"" + extra + " > \"" + (dir / "log.txt").string() + "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "run failed: " + slurp(dir / "log.txt")};
    csvs.push_back(slurp(dir / "out" / "verify_kappa.csv"));
  }
  const bool same = !csvs[0].empty() && csvs[0] == csvs[1] && csvs[1] == csvs[2];
  return {same, std::string("three runs (cold cache, warm cache, no cache): CSV ") +
                    (same ? "byte-identical" : "differs") + ", " + std::to_string(csvs[0].size()) + " bytes"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <1..10> [cli-path]\n";
    return 2;
  }
  const int id = std::atoi(argv[1]);
  const std::string cli = argc > 2 ? argv[2] : "";
  const std::map<int, std::function<Outcome()>> criteria{
      {1, parametrix_biorthogonality},
      {2, split_relations},
      {3, special_function_reduction},
      {4, equilibrium_oracle},
      {5, biorthogonality_by_construction},
      {6, kappa_asymptotics},
      {7, polynomial_asymptotics},
      {8, kernel_limit},
      {9, riemann_hilbert},
      {10, [&] { return determinism(cli); }},
  };
  const auto it = criteria.find(id);
  if (it == criteria.end()) {
    std::cerr << "unknown criterion " << argv[1] << '\n';
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = it->second();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "criterion " << id << ": " << (out.pass ? "PASS" : "FAIL") << " - " << out.detail << " ["
            << num(secs) << " s]\n";
  return out.pass ? 0 : 1;
}
