#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace mbh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;

// Effective settings of one run after merging the config file and flags.
struct RunConfig {
  std::string command;
  double theta = 1.0;
  double alpha = 0.0;
  nlohmann::json potential = {{"type", "linear"}};
  std::vector<int> n_list;  // verify falls back to 8,12,16,24
  int degree = -1;  // biortho: -1 means n
  int mantissa_bits = 256;
  double rel_tol = 0.0;
  std::string target = "kappa";
  std::vector<std::pair<double, double>> points{{0.7, 1.1}, {1.0, 2.0}, {2.0, 0.5}};
  int burn_in = 0;
  int grid_size = 48;
  // specfun
  std::vector<double> wright{1.0, 1.0};
  std::vector<double> x{1.0};  // real, or real and imaginary part
  int fox_kind = 0;            // 1..3 selects a Fox I function instead
  double fox_a = 0.0;
  // parametrix-check
  int jmax = 6;
  std::vector<double> radii{0.5, 1.0, 2.0};
  double gamma = 0.0;
  std::string family = "both";
  double tolerance = 1e-10;
  // kernel
  double kx = 1.0;
  double ky = 1.0;
  // output
  std::string out_dir;
  std::string cache_dir;
  bool use_cache = true;

  // Throws mbh::DomainError on a violated invariant.
  void validate() const;
  // Canonical JSON form; hashing it gives the config hash.
  nlohmann::json to_json() const;
};

// MB_PREC_BITS when set and valid, else 256.
int default_mantissa_bits();

// Full command line front end; returns the process exit code.
int run(int argc, char** argv);

}  // namespace mbh::cli
