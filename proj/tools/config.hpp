#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "choquard/calculus.hpp"
#include "choquard/kernels.hpp"
#include "choquard/quadrature.hpp"
#include "choquard/solver.hpp"
#include "choquard/variational.hpp"

namespace choquard::cli {

/// Unreadable, malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every verification suite name, in run order.
const std::vector<std::string>& all_suites();

struct ProblemConfig {
  int dim = 2;
  int radius = 16;
  double alpha = 1.0;
  double p = 2.0;
  double lambda = 100.0;
  std::vector<double> lambda_grid{1.0, 10.0, 100.0, 1000.0, 10000.0};
  int omega_radius = 2;
  PotentialProfile profile = PotentialProfile::distance;
  double bound = 1.0;
  double cap = 0.0;
  KernelKind kernel = KernelKind::green;
  Mode mode = Mode::dirichlet;
};

struct OutputConfig {
  std::filesystem::path dir = "choquard-out";
  std::filesystem::path cache_dir = "choquard-cache";
};

struct VerifyConfig {
  std::vector<std::string> suites = all_suites();
  std::uint64_t seed = 7;
  /// Window radius of the Green-identity check.
  int green_radius = 40;
  int hls_samples = 200;
  /// Sample count of the remaining randomised suites.
  int samples = 100;
};

struct RunConfig {
  ProblemConfig problem;
  QuadratureSpec quadrature;
  SolverConfig solver;
  /// Starting field for the `supplied` initializer.
  std::filesystem::path initial_field;
  OutputConfig output;
  VerifyConfig verify;

  /// Cheap cross-field checks; the problem itself is validated when built.
  void validate() const;
};

/// Strict parse: unknown keys and wrongly typed values raise ConfigError.
/// Absent keys keep their defaults.
RunConfig config_from_json(const nlohmann::ordered_json& j);
/// Complete resolved form; config_from_json(config_to_json(c)) reproduces c.
nlohmann::ordered_json config_to_json(const RunConfig& c);

RunConfig load_config(const std::filesystem::path& path);

/// Comma-separated list of numbers or names.
std::vector<double> parse_number_list(const std::string& text);
std::vector<std::string> parse_name_list(const std::string& text);

/// The objects the configuration describes.
LatticeWindow problem_window(const RunConfig& c);
PotentialSpec problem_potential(const RunConfig& c);
ProblemSpec make_problem(const RunConfig& c, std::shared_ptr<const KernelTable> kernel, Mode mode,
                         double lambda);

}  // namespace choquard::cli
