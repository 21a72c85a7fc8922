#include "cli.hpp"

#include "CLI11.hpp"
#include "mbh/errors.hpp"
#include "mbh/hardedge.hpp"
#include "mbh/parametrix.hpp"
#include "mbh/serialize.hpp"
#include "mbh/wright.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace mbh::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Malformed flags or config; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<int> kDefaultNList{8, 12, 16, 24};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string digits(const Real& v, const PrecisionContext& ctx) {
  const int count = static_cast<int>(std::ceil(ctx.tolerance_bits() * 0.30102999566398120)) + 1;
  return v.str(count, std::ios_base::fmtflags(0));
}

std::string digits(const ComplexValue& v, const PrecisionContext& ctx) {
  // Imaginary parts below the tolerance are rounding noise of a real value.
  if (abs(v.im) <= ctx.tolerance() * abs(v)) return digits(v.re, ctx);
  return digits(v.re, ctx) + (v.im < 0 ? " - " : " + ") + digits(abs(v.im), ctx) + "i";
}

json parse_potential(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw CLI::ValidationError("--potential", e.what());
    }
  }
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "linear" && rest.empty()) return {{"type", "linear"}};
    if (kind == "monomial" && !rest.empty()) return {{"type", "monomial"}, {"r", std::stoi(rest)}};
    if (kind == "series" && !rest.empty()) {
      std::vector<double> coeffs;
      std::stringstream in(rest);
      for (std::string item; std::getline(in, item, ',');) coeffs.push_back(std::stod(item));
      return {{"type", "series"}, {"coeffs", coeffs}};
    }
  } catch (const std::logic_error&) {
  }
  throw CLI::ValidationError("--potential", "expected linear, monomial:R, series:c0,c1,... or a JSON object");
}

std::pair<double, double> parse_point(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon != std::string::npos) return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::logic_error&) {
  }
  throw CLI::ValidationError("--points", "expected x:y, got '" + text + "'");
}

// Flags and config keys share names; a flag given on the command line wins.
class Bindings {
 public:
  template <class T>
  CLI::Option* add(CLI::App* owner, const std::string& name, T& target, const std::string& help) {
    CLI::Option* opt = owner->add_option("--" + name, target, help);
    entries_.push_back({owner, opt, name, [&target](const json& j) { target = j.get<T>(); }});
    return opt;
  }
  CLI::Option* add_parsed(CLI::App* owner, const std::string& name, const std::string& help,
                          std::function<void(const std::string&)> from_flag, std::function<void(const json&)> from_config) {
    CLI::Option* opt = owner->add_option_function<std::string>("--" + name, std::move(from_flag), help);
    entries_.push_back({owner, opt, name, std::move(from_config)});
    return opt;
  }
  CLI::Option* add_list(CLI::App* owner, const std::string& name, std::vector<double>& target, const std::string& help) {
    return add(owner, name, target, help)->delimiter(',');
  }

  void apply(const json& config, const CLI::App& root) const {
    if (!config.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : config.items()) {
      bool known = false;
      for (const auto& e : entries_) {
        if (e.name != key) continue;
        known = true;
        if ((e.owner != &root && !e.owner->parsed()) || e.option->count() > 0) continue;
        try {
          e.assign(value);
        } catch (const json::exception& err) {
          throw UsageError("config key '" + key + "': " + err.what());
        }
      }
      if (!known) throw UsageError("unknown config key '" + key + "'");
    }
  }

 private:
  struct Entry {
    const CLI::App* owner;
    const CLI::Option* option;
    std::string name;
    std::function<void(const json&)> assign;
  };
  std::vector<Entry> entries_;
};

PrecisionContext context_of(const RunConfig& c) {
  PrecisionContext ctx = PrecisionContext::with_bits(c.mantissa_bits);
  ctx.rel_tol = c.rel_tol;
  return ctx;
}

Potential potential_of(const RunConfig& c) {
  try {
    return Potential::from_json(c.potential);
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad potential descriptor: ") + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Shared cache of biorthogonal systems, keyed by cache_key.
SystemProvider cached_provider(const RunConfig& c, int& hits, int& misses) {
  if (!c.use_cache || c.cache_dir.empty()) return {};
  return [dir = fs::path(c.cache_dir), &hits, &misses](const WeightParams& w, int degree, const PrecisionContext& ctx) {
    const fs::path file = dir / (cache_key(w, degree, ctx.mantissa_bits) + ".json");
    if (fs::exists(file)) {
      try {
        BiorthogonalSystem sys = system_from_json(json::parse(read_file(file)));
        if (sys.degree == degree && sys.params.n == w.n && sys.params.theta == w.theta &&
            sys.params.alpha == w.alpha && sys.params.potential.descriptor() == w.potential.descriptor()) {
          ++hits;
          return sys;
        }
      } catch (const std::exception&) {
        // Unreadable entries are rebuilt below.
      }
    }
    ++misses;
    BiorthogonalSystem sys = build_system_auto(w, degree, ctx);
    write_file(file, to_json(sys).dump(1) + "\n");
    return sys;
  };
}

json envelope(const RunConfig& c) {
  const json config = c.to_json();
  const PrecisionContext ctx = context_of(c);
  return {{"schema_version", 1},
          {"command", c.command},
          {"config", config},
          {"config_hash", fnv1a_hex(config.dump())},
          {"precision", {{"mantissa_bits", c.mantissa_bits}, {"rel_tol", ctx.tolerance()}}}};
}

json report_json(const ConvergenceReport& r, int burn_in) {
  const auto& k = r.constants;
  return {{"target", r.target},
          {"label", r.label},
          {"n", r.n_values},
          {"error", r.errors},
          {"ratio", r.ratios},
          {"bits_used", r.bits_used},
          {"scale_constant", r.scale_constants},
          {"fitted_rate", r.fitted_rate},
          {"predicted_rate", r.predicted_rate},
          {"strictly_decreasing", r.strictly_decreasing(static_cast<std::size_t>(burn_in))},
          {"rate_within_35_percent", r.rate_within(0.35)},
          {"constants",
           {{"rho", k.rho}, {"c", k.c}, {"ell", k.ell}, {"g0_re", k.g0_re}, {"gtilde0_re", k.gtilde0_re},
            {"m_theta", k.m_theta}}}};
}

std::string report_csv(const ConvergenceReport& r) {
  std::string out = "n,error,ratio\n";
  for (std::size_t i = 0; i < r.n_values.size(); ++i)
    out += std::to_string(r.n_values[i]) + ',' + shortest(r.errors[i]) + ',' + shortest(r.ratios[i]) + '\n';
  return out;
}

void emit_json(const RunConfig& c, const std::string& stem, const json& doc) {
  if (!c.out_dir.empty()) write_file(fs::path(c.out_dir) / (stem + ".json"), doc.dump(2) + "\n");
}

int cmd_specfun(const RunConfig& c) {
  const PrecisionContext ctx = context_of(c);
  PrecisionGuard g(c.mantissa_bits);
  if (c.x.empty() || c.x.size() > 2) throw DomainError("--x takes re or re,im");
  const ComplexValue x(Real(c.x[0]), c.x.size() > 1 ? Real(c.x[1]) : Real(0));
  ComplexValue value;
  std::string what;
  if (c.fox_kind != 0) {
    if (c.fox_kind < 1 || c.fox_kind > 3) throw DomainError("--fox takes 1, 2 or 3");
    value = fox_I(static_cast<FoxKind>(c.fox_kind), {Real(c.theta), Real(c.fox_a)}, x, ctx);
    what = "I" + std::to_string(c.fox_kind) + "(theta=" + shortest(c.theta) + ", a=" + shortest(c.fox_a) + ")";
  } else {
    if (c.wright.size() != 2) throw DomainError("--wright takes a1,a2");
    if (!(c.wright[1] > 0)) throw DomainError("--wright needs a2 > 0");
    value = wright_bessel({Real(c.wright[0]), Real(c.wright[1])}, x, ctx);
    what = "J(" + shortest(c.wright[0]) + ", " + shortest(c.wright[1]) + ")";
  }
  const std::string text = digits(value, ctx);
  std::cout << text << '\n';
  json doc = envelope(c);
  doc["function"] = what;
  doc["value"] = {{"re", to_decimal(value.re)}, {"im", to_decimal(value.im)}};
  emit_json(c, "specfun", doc);
  return kExitOk;
}

int cmd_parametrix(const RunConfig& c) {
  const PrecisionContext ctx = context_of(c);
  PrecisionGuard g(c.mantissa_bits);
  const ModelParams p{Real(c.theta), Real(c.alpha), Real(c.gamma)};
  std::vector<Family> families;
  if (c.family == "plain" || c.family == "both") families.push_back(Family::plain);
  if (c.family == "tilde" || c.family == "both") families.push_back(Family::tilde);
  json doc = envelope(c);
  double worst_delta = 0;
  double worst_spread = 0;
  for (Family f : families) {
    std::vector<std::vector<std::vector<ComplexValue>>> mats;
    json per_radius = json::array();
    for (double r : c.radii) {
      mats.push_back(biorthogonality_matrix(p, f, c.jmax + 1, Real(r), ctx));
      double dev = 0;
      for (int j = 0; j <= c.jmax; ++j)
        for (int k = 0; k <= c.jmax; ++k)
          dev = std::max(dev, abs(mats.back()[j][k] - ComplexValue(Real(j == k ? 1 : 0))).convert_to<double>());
      worst_delta = std::max(worst_delta, dev);
      per_radius.push_back({{"radius", r}, {"max_deviation_from_delta", dev}});
    }
    double spread = 0;
    for (std::size_t m = 1; m < mats.size(); ++m)
      for (int j = 0; j <= c.jmax; ++j)
        for (int k = 0; k <= c.jmax; ++k)
          spread = std::max(spread, abs(mats[m][j][k] - mats[0][j][k]).convert_to<double>());
    worst_spread = std::max(worst_spread, spread);
    doc[f == Family::plain ? "plain" : "tilde"] = {{"radii", per_radius}, {"radius_spread", spread}};
  }
  const bool ok = worst_delta <= c.tolerance && worst_spread <= c.tolerance;
  doc["max_deviation_from_delta"] = worst_delta;
  doc["max_radius_spread"] = worst_spread;
  doc["within_tolerance"] = ok;
  emit_json(c, "parametrix_check", doc);
  std::cout << "parametrix-check theta=" << shortest(c.theta) << " alpha=" << shortest(c.alpha) << " jmax=" << c.jmax
            << ": max |<G,H> - delta| = " << shortest(worst_delta) << ", radius spread = " << shortest(worst_spread)
            << (ok ? " (within " : " (exceeds ") << shortest(c.tolerance) << ")\n";
  return ok ? kExitOk : kExitNonConvergence;
}

int cmd_equilibrium(const RunConfig& c) {
  const EquilibriumData eq = solve_equilibrium(potential_of(c), c.theta, c.grid_size);
  const double mass = eq.mass_above(0.0);
  json doc = envelope(c);
  doc["b"] = eq.b;
  doc["d1"] = eq.d1;
  doc["d2"] = eq.d2;
  doc["c"] = eq.c;
  doc["rho"] = eq.rho;
  doc["varrho"] = eq.varrho;
  doc["m_theta"] = eq.m_theta;
  doc["lagrange_ell"] = eq.lagrange_ell;
  doc["g0_re"] = eq.g0_re;
  doc["gtilde0_re"] = eq.gtilde0_re;
  doc["edge_exponent"] = eq.edge_exponent;
  doc["mass"] = mass;
  emit_json(c, "equilibrium", doc);
  if (!c.out_dir.empty()) {
    std::string csv = "x,psi\n";
    for (std::size_t i = 0; i < eq.grid.size(); ++i) csv += shortest(eq.grid[i]) + ',' + shortest(eq.psi[i]) + '\n';
    write_file(fs::path(c.out_dir) / "equilibrium_density.csv", csv);
  }
  std::cout << "equilibrium theta=" << shortest(c.theta) << " V=" << c.potential.dump() << ": b=" << shortest(eq.b)
            << " d1=" << shortest(eq.d1) << " rho=" << shortest(eq.rho) << " c=" << shortest(eq.c)
            << " ell=" << shortest(eq.lagrange_ell) << " mass=" << shortest(mass) << '\n';
  return kExitOk;
}

WeightParams weight_of(const RunConfig& c, int n) {
  WeightParams w;
  w.theta = Real(c.theta);
  w.alpha = Real(c.alpha);
  w.n = n;
  w.potential = potential_of(c);
  w.validate();
  return w;
}

int cmd_biortho(const RunConfig& c) {
  if (c.n_list.empty()) throw DomainError("biortho needs --n");
  const PrecisionContext ctx = context_of(c);
  int hits = 0;
  int misses = 0;
  const SystemProvider cached = cached_provider(c, hits, misses);
  std::ostringstream line;
  line << "biortho theta=" << shortest(c.theta) << " alpha=" << shortest(c.alpha) << " V=" << c.potential.dump()
       << ':';
  for (int n : c.n_list) {
    const int degree = c.degree < 0 ? n : c.degree;
    const WeightParams w = weight_of(c, n);
    const BiorthogonalSystem sys = cached ? cached(w, degree, ctx) : build_system_auto(w, degree, ctx);
    PrecisionGuard g(sys.mantissa_bits);
    const double residual = sys.moment_residual().convert_to<double>();
    json doc = envelope(c);
    doc["n"] = n;
    doc["moment_residual"] = residual;
    doc["system"] = to_json(sys);
    emit_json(c, "biortho_n" + std::to_string(n), doc);
    line << " n=" << n << " degree=" << degree << " bits=" << sys.mantissa_bits
         << " kappa_n=" << sys.kappas[degree].str(12, std::ios_base::scientific) << " residual=" << shortest(residual)
         << (sys.ill_conditioned ? " ill-conditioned" : "") << ';';
  }
  line << " cache hits=" << hits << " misses=" << misses;
  std::cout << line.str() << '\n';
  return kExitOk;
}

Experiment experiment_of(const RunConfig& c, SystemProvider provider) {
  Experiment ex;
  ex.eq = solve_equilibrium(potential_of(c), c.theta, c.grid_size);
  ex.theta = Real(c.theta);
  ex.alpha = Real(c.alpha);
  ex.ctx = context_of(c);
  ex.systems = std::move(provider);
  return ex;
}

int cmd_kernel(const RunConfig& c, bool finite_n) {
  const PrecisionContext ctx = context_of(c);
  PrecisionGuard g(c.mantissa_bits);
  if (c.kx < 0 || c.ky < 0) throw DomainError("kernel needs x, y >= 0");
  const Real limit = limit_kernel(Real(c.kx), Real(c.ky), Real(c.alpha), Real(c.theta), ctx);
  json doc = envelope(c);
  doc["limit_kernel"] = to_decimal(limit);
  std::ostringstream line;
  line << "kernel theta=" << shortest(c.theta) << " alpha=" << shortest(c.alpha) << " x=" << shortest(c.kx)
       << " y=" << shortest(c.ky) << ": K=" << digits(limit, ctx);
  if (finite_n) {
    int hits = 0;
    int misses = 0;
    const Experiment ex = experiment_of(c, cached_provider(c, hits, misses));
    const auto reports = verify_kernel_limit(ex, c.n_list, {{c.kx, c.ky}});
    doc["reports"] = json::array();
    for (const auto& r : reports) {
      doc["reports"].push_back(report_json(r, c.burn_in));
      line << "; " << r.label.substr(r.label.rfind('=') + 1) << " error(n=" << r.n_values.back()
           << ")=" << shortest(r.errors.back());
    }
  }
  emit_json(c, "kernel", doc);
  std::cout << line.str() << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& c) {
  int hits = 0;
  int misses = 0;
  const Experiment ex = experiment_of(c, cached_provider(c, hits, misses));
  std::vector<ConvergenceReport> reports;
  if (c.target == "p") {
    reports.push_back(verify_pn_asymptotics(ex, c.n_list, default_z_samples()));
  } else if (c.target == "q") {
    reports.push_back(verify_qn_asymptotics(ex, c.n_list, default_z_samples()));
  } else if (c.target == "kappa") {
    reports.push_back(verify_kappa(ex, c.n_list));
  } else {
    std::vector<KernelPoint> pts;
    for (auto [x, y] : c.points) pts.push_back({x, y});
    reports = verify_kernel_limit(ex, c.n_list, pts);
  }
  json doc = envelope(c);
  doc["reports"] = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    doc["reports"].push_back(report_json(reports[i], c.burn_in));
    if (!c.out_dir.empty()) {
      const std::string stem = reports.size() == 1 ? "verify_" + c.target : "verify_" + c.target + "_" + std::to_string(i);
      write_file(fs::path(c.out_dir) / (stem + ".csv"), report_csv(reports[i]));
    }
  }
  emit_json(c, "verify_" + c.target, doc);
  const ConvergenceReport& first = reports.front();
  std::cout << "verify " << c.target << " theta=" << shortest(c.theta) << " alpha=" << shortest(c.alpha)
            << " V=" << c.potential.dump() << ": n=" << c.n_list.front() << ".." << c.n_list.back()
            << " error(n_max)=" << shortest(first.errors.back()) << " fitted_rate=" << shortest(first.fitted_rate)
            << " predicted_rate=" << shortest(first.predicted_rate)
            << " decreasing=" << (first.strictly_decreasing(static_cast<std::size_t>(c.burn_in)) ? "yes" : "no")
            << (reports.size() > 1 ? " (first of " + std::to_string(reports.size()) + " reports)" : "")
            << " cache hits=" << hits << " misses=" << misses << '\n';
  return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
  if (!(theta > 0) || !std::isfinite(theta)) throw DomainError("theta must be positive");
  if (!(alpha > -1) || !std::isfinite(alpha)) throw DomainError("alpha must exceed -1");
  if (mantissa_bits < 64) throw DomainError("mantissa_bits must be at least 64");
  if (rel_tol < 0) throw DomainError("rel_tol must be non-negative");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw DomainError("n values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw DomainError("n values must be increasing");
  }
  if (degree < -1) throw DomainError("degree must be non-negative");
  if (target != "p" && target != "q" && target != "kappa" && target != "kernel")
    throw DomainError("target must be p, q, kappa or kernel");
  for (auto [x, y] : points)
    if (!(x > 0) || !(y > 0)) throw DomainError("kernel points must be positive");
  if (burn_in < 0) throw DomainError("burn-in must be non-negative");
  if (grid_size < 8) throw DomainError("grid size must be at least 8");
  if (jmax < 0) throw DomainError("jmax must be non-negative");
  for (double r : radii)
    if (!(r > 0)) throw DomainError("radii must be positive");
  if (radii.empty()) throw DomainError("radii must not be empty");
  if (family != "plain" && family != "tilde" && family != "both") throw DomainError("family must be plain, tilde or both");
  if (!(gamma >= 0)) throw DomainError("gamma must be non-negative");
  if (!(tolerance > 0)) throw DomainError("tolerance must be positive");
  if (!potential_of(*this).has_log_growth()) throw DomainError("the potential must grow faster than log x");
}

json RunConfig::to_json() const {
  json pts = json::array();
  for (auto [x, y] : points) pts.push_back({x, y});
  return {{"command", command},     {"theta", theta},         {"alpha", alpha},       {"potential", potential},
          {"n", n_list},            {"degree", degree},       {"bits", mantissa_bits}, {"rel_tol", rel_tol},
          {"target", target},       {"points", pts},          {"burn_in", burn_in},   {"grid", grid_size},
          {"wright", wright},       {"x", x},                 {"fox", fox_kind},      {"a", fox_a},
          {"jmax", jmax},           {"radii", radii},         {"gamma", gamma},       {"family", family},
          {"tolerance", tolerance}, {"kx", kx},               {"ky", ky},             {"cache", use_cache}};
}

int default_mantissa_bits() {
  if (const char* env = std::getenv("MB_PREC_BITS")) {
    int bits = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), bits);
    if (res.ec == std::errc{} && res.ptr == text.data() + text.size() && bits >= 64) return bits;
    std::cerr << "ignoring MB_PREC_BITS=" << env << " (needs an integer >= 64)\n";
  }
  return 256;
}

int run(int argc, char** argv) {
  CLI::App app{"Hard-edge asymptotics of biorthogonal ensembles: numerics and verification", "mbh"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "mbh 0.1.0");

  RunConfig c;
  c.mantissa_bits = default_mantissa_bits();
  Bindings b;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  b.add(&app, "bits", c.mantissa_bits, "MPFR mantissa bits (default MB_PREC_BITS or 256)");
  b.add(&app, "rel-tol", c.rel_tol, "relative tolerance, 0 for 2^-(bits/2)");
  b.add(&app, "out", c.out_dir, "output directory for CSV and JSON");
  b.add(&app, "cache", c.cache_dir, "system cache directory (default <out>/cache)");
  bool no_cache = false;
  app.add_flag("--no-cache", no_cache, "build every system afresh");

  auto* specfun = app.add_subcommand("specfun", "evaluate a Wright or Fox I function");
  auto* parametrix = app.add_subcommand("parametrix-check", "biorthogonality of the model families");
  auto* equilibrium = app.add_subcommand("equilibrium", "equilibrium measure and edge constants");
  auto* biortho = app.add_subcommand("biortho", "build biorthogonal systems");
  auto* kernel = app.add_subcommand("kernel", "limit kernel and finite-n comparison");
  auto* verify = app.add_subcommand("verify", "convergence reports");

  const auto potential_flag = [&](CLI::App* sub) {
    b.add_parsed(
        sub, "potential", "linear | monomial:R | series:c0,c1,... | JSON",
        [&](const std::string& s) { c.potential = parse_potential(s); },
        [&](const json& j) { c.potential = j.is_string() ? parse_potential(j.get<std::string>()) : j; });
  };
  const auto n_flag = [&](CLI::App* sub) { b.add(sub, "n", c.n_list, "comma separated, increasing")->delimiter(','); };
  for (CLI::App* sub : {specfun, parametrix, equilibrium, biortho, kernel, verify}) b.add(sub, "theta", c.theta, "theta > 0");
  for (CLI::App* sub : {parametrix, biortho, kernel, verify}) b.add(sub, "alpha", c.alpha, "alpha > -1");
  for (CLI::App* sub : {equilibrium, biortho, kernel, verify}) potential_flag(sub);
  for (CLI::App* sub : {equilibrium, kernel, verify}) b.add(sub, "grid", c.grid_size, "collocation modes");
  for (CLI::App* sub : {biortho, kernel, verify}) n_flag(sub);
  for (CLI::App* sub : {kernel, verify}) b.add(sub, "burn-in", c.burn_in, "points skipped in the monotonicity check");

  b.add_list(specfun, "wright", c.wright, "a1,a2");
  b.add_list(specfun, "x", c.x, "re or re,im");
  b.add(specfun, "fox", c.fox_kind, "1, 2 or 3 selects I1, I2, I3 instead of the Wright function");
  b.add(specfun, "a", c.fox_a, "parameter a of the Fox I function");

  b.add(parametrix, "jmax", c.jmax, "largest index j, k");
  b.add_list(parametrix, "radii", c.radii, "circle radii");
  b.add(parametrix, "gamma", c.gamma, "ray opening");
  b.add(parametrix, "family", c.family, "plain, tilde or both");
  b.add(parametrix, "tolerance", c.tolerance, "pass threshold for the deviations");

  b.add(biortho, "degree", c.degree, "highest degree, default n");

  b.add(kernel, "kx", c.kx, "first argument");
  b.add(kernel, "ky", c.ky, "second argument");

  b.add(verify, "target", c.target, "p, q, kappa or kernel");
  b.add_parsed(
      verify, "points", "kernel points x:y,...",
      [&](const std::string& s) {
        c.points.clear();
        std::stringstream in(s);
        for (std::string item; std::getline(in, item, ',');) c.points.push_back(parse_point(item));
      },
      [&](const json& j) { c.points = j.get<std::vector<std::pair<double, double>>>(); });

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      json config;
      try {
        config = json::parse(read_file(config_path));
      } catch (const json::exception& e) {
        throw UsageError("config " + config_path + ": " + e.what());
      }
      b.apply(config, app);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  c.command = app.get_subcommands().front()->get_name();
  c.use_cache = !no_cache;
  if (c.cache_dir.empty() && !c.out_dir.empty()) c.cache_dir = (fs::path(c.out_dir) / "cache").string();
  const bool kernel_finite_n = c.command == "kernel" && !c.n_list.empty();
  if (c.command == "verify" && c.n_list.empty()) c.n_list = kDefaultNList;

  try {
    c.validate();
    if (c.command == "specfun") return cmd_specfun(c);
    if (c.command == "parametrix-check") return cmd_parametrix(c);
    if (c.command == "equilibrium") return cmd_equilibrium(c);
    if (c.command == "biortho") return cmd_biortho(c);
    if (c.command == "kernel") return cmd_kernel(c, kernel_finite_n);
    return cmd_verify(c);
  } catch (const DomainError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace mbh::cli
