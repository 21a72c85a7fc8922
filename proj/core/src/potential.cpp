#include "mbh/potential.hpp"

#include "mbh/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace mbh {
namespace {

template <class T>
T horner(const std::vector<double>& c, const T& x) {
  T acc(0.0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + T(*it);
  return acc;
}

std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  return d;
}

}  // namespace

Potential Potential::linear() {
  Potential v;
  v.kind_ = Kind::linear;
  v.coeffs_ = {0.0, 1.0};
  return v;
}

Potential Potential::monomial(int power) {
  if (power < 1) throw DomainError("monomial potential needs r >= 1");
  Potential v;
  v.kind_ = Kind::monomial;
  v.power_ = power;
  v.coeffs_.assign(static_cast<std::size_t>(power) + 1, 0.0);
  v.coeffs_.back() = 1.0;
  return v;
}

Potential Potential::series(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 2) throw DomainError("series potential must be non-constant");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw DomainError("series potential has a non-finite coefficient");
  Potential v;
  v.kind_ = Kind::series;
  v.coeffs_ = std::move(coeffs);
  return v;
}

Potential Potential::custom(Custom fns) {
  if (!fns.value || !fns.first || !fns.second) throw DomainError("custom potential needs V, V' and V''");
  Potential v;
  v.kind_ = Kind::custom;
  v.custom_ = std::move(fns);
  if (v.custom_.name.empty()) v.custom_.name = "custom";
  return v;
}

Potential Potential::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") return linear();
  if (type == "monomial") return monomial(j.at("r").get<int>());
  if (type == "series") return series(j.at("coeffs").get<std::vector<double>>());
  throw DomainError("unknown potential type '" + type + "'");
}

nlohmann::json Potential::to_json() const {
  switch (kind_) {
    case Kind::linear:
      return {{"type", "linear"}};
    case Kind::monomial:
      return {{"type", "monomial"}, {"r", power_}};
    case Kind::series:
      return {{"type", "series"}, {"coeffs", coeffs_}};
    case Kind::custom:
      return {{"type", "custom"}, {"name", custom_.name}};
  }
  return {};
}

std::string Potential::descriptor() const { return to_json().dump(); }

double Potential::value(double x) const {
  return kind_ == Kind::custom ? custom_.value(x) : horner(coeffs_, x);
}

double Potential::first_derivative(double x) const {
  return kind_ == Kind::custom ? custom_.first(x) : horner(differentiate(coeffs_), x);
}

double Potential::second_derivative(double x) const {
  return kind_ == Kind::custom ? custom_.second(x) : horner(differentiate(differentiate(coeffs_)), x);
}

std::complex<double> Potential::value(std::complex<double> z) const {
  if (kind_ == Kind::custom) {
    if (z.imag() != 0.0) throw DomainError("custom potential has no complex extension");
    return custom_.value(z.real());
  }
  return horner(coeffs_, z);
}

Real Potential::value(const Real& x) const {
  if (kind_ == Kind::custom) throw DomainError("custom potential is double precision only");
  Real acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + Real(*it);
  return acc;
}

ComplexValue Potential::value(const ComplexValue& z) const {
  if (kind_ == Kind::custom) throw DomainError("custom potential is double precision only");
  ComplexValue acc(Real(0));
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + ComplexValue(Real(*it));
  return acc;
}

bool Potential::has_log_growth() const {
  double prev = -INFINITY;
  for (double x : {1e2, 1e4, 1e6}) {
    const double r = value(x) / std::log(x);
    if (!std::isfinite(r) || r <= prev) return false;
    prev = r;
  }
  return prev > 1.0;
}

bool check_one_cut_sufficient(const Potential& v, double xmax) {
  constexpr int kPoints = 1000;
  const double lo = std::log(xmax) - 8.0 * std::log(10.0);
  const double hi = std::log(xmax);
  for (int i = 0; i < kPoints; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (kPoints - 1));
    const double s = x * v.second_derivative(x) + v.first_derivative(x);
    if (!(s > 0.0)) return false;
  }
  return true;
}

}  // namespace mbh
