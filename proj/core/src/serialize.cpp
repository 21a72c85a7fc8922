#include "mbh/serialize.hpp"

#include "mbh/errors.hpp"

#include <cstdint>
#include <cstdio>

namespace mbh {
namespace {

constexpr int kFormatVersion = 1;

nlohmann::json rows(const std::vector<std::vector<Real>>& m) {
  auto out = nlohmann::json::array();
  for (const auto& row : m) {
    auto r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(to_decimal(v));
    out.push_back(std::move(r));
  }
  return out;
}

Real parse(const nlohmann::json& v) { return Real(v.get<std::string>()); }

std::vector<std::vector<Real>> parse_rows(const nlohmann::json& m) {
  std::vector<std::vector<Real>> out;
  for (const auto& row : m) {
    auto& r = out.emplace_back();
    for (const auto& v : row) r.push_back(parse(v));
  }
  return out;
}

// Fixed-width rendering so the key does not depend on how precisely theta
// and alpha happen to be stored.
std::string canonical(const Real& x) { return x.str(40, std::ios_base::scientific); }

}  // namespace

nlohmann::json to_json(const BiorthogonalSystem& sys) {
  nlohmann::json kappas = nlohmann::json::array();
  for (const auto& k : sys.kappas) kappas.push_back(to_decimal(k));
  return {
      {"format_version", kFormatVersion},
      {"theta", to_decimal(sys.params.theta)},
      {"alpha", to_decimal(sys.params.alpha)},
      {"n", sys.params.n},
      {"potential", sys.params.potential.to_json()},
      {"degree", sys.degree},
      {"mantissa_bits", sys.mantissa_bits},
      {"ill_conditioned", sys.ill_conditioned},
      {"p_coeffs", rows(sys.p_coeffs)},
      {"q_coeffs", rows(sys.q_coeffs)},
      {"kappas", std::move(kappas)},
      {"moments", rows(sys.moments)},
  };
}

BiorthogonalSystem system_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion) throw DomainError("unsupported system format");
    BiorthogonalSystem sys;
    sys.mantissa_bits = doc.at("mantissa_bits").get<int>();
    PrecisionGuard guard(sys.mantissa_bits);
    sys.params.theta = parse(doc.at("theta"));
    sys.params.alpha = parse(doc.at("alpha"));
    sys.params.n = doc.at("n").get<int>();
    sys.params.potential = Potential::from_json(doc.at("potential"));
    sys.degree = doc.at("degree").get<int>();
    sys.ill_conditioned = doc.at("ill_conditioned").get<bool>();
    sys.p_coeffs = parse_rows(doc.at("p_coeffs"));
    sys.q_coeffs = parse_rows(doc.at("q_coeffs"));
    sys.moments = parse_rows(doc.at("moments"));
    for (const auto& k : doc.at("kappas")) sys.kappas.push_back(parse(k));
    const auto size = static_cast<std::size_t>(sys.degree) + 1;
    if (sys.p_coeffs.size() != size || sys.q_coeffs.size() != size || sys.kappas.size() != size)
      throw DomainError("system document has inconsistent sizes");
    return sys;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed system document: ") + e.what());
  }
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string cache_key(const WeightParams& params, int degree, int mantissa_bits) {
  const std::string text = params.potential.descriptor() + '|' + canonical(params.theta) + '|' +
                           canonical(params.alpha) + '|' + std::to_string(params.n) + '|' +
                           std::to_string(degree) + '|' + std::to_string(mantissa_bits);
  return fnv1a_hex(text);
}

}  // namespace mbh
