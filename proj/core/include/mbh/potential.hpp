#pragma once

#include "mbh/complex.hpp"

#include <nlohmann/json_fwd.hpp>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace mbh {

// External field V on [0, inf). Polynomial kinds (linear, monomial, series)
// evaluate at any precision and off the real axis; custom potentials only
// provide double-precision V, V' and V'' on the half-line.
class Potential {
 public:
  enum class Kind { linear, monomial, series, custom };

  struct Custom {
    std::function<double(double)> value;
    std::function<double(double)> first;
    std::function<double(double)> second;
    std::string name;
  };

  static Potential linear();
  static Potential monomial(int power);
  // V(x) = sum_k coeffs[k] x^k.
  static Potential series(std::vector<double> coeffs);
  static Potential custom(Custom fns);

  // {"type":"linear"} | {"type":"monomial","r":int} | {"type":"series","coeffs":[...]}
  static Potential from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // Canonical one-line descriptor used in cache keys and reports.
  std::string descriptor() const;

  Kind kind() const { return kind_; }
  bool is_polynomial() const { return kind_ != Kind::custom; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double value(double x) const;
  double first_derivative(double x) const;
  double second_derivative(double x) const;
  std::complex<double> value(std::complex<double> z) const;
  // Throws DomainError for custom potentials.
  Real value(const Real& x) const;
  ComplexValue value(const ComplexValue& z) const;
  // Polynomial degree; 0 for custom potentials.
  int degree() const { return kind_ == Kind::custom ? 0 : static_cast<int>(coeffs_.size()) - 1; }

  // V(x)/log x sampled at 1e2, 1e4, 1e6 must increase and end above 1.
  bool has_log_growth() const;

 private:
  Kind kind_ = Kind::linear;
  int power_ = 1;
  std::vector<double> coeffs_;
  Custom custom_;
};

// x V''(x) + V'(x) > 0 on a log-spaced grid of 1000 points in (0, xmax].
bool check_one_cut_sufficient(const Potential& v, double xmax);

}  // namespace mbh
