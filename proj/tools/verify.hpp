#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "choquard/kernels.hpp"
#include "config.hpp"

namespace choquard::cli {

struct SuiteResult {
  std::string name;
  bool passed = true;
  /// Measured constants and errors, in insertion order.
  std::vector<std::pair<std::string, double>> measured;
  std::vector<std::string> failures;
};

nlohmann::ordered_json suite_json(const SuiteResult& r);

/// Runs property suites against one configuration. Kernel tables go through
/// the configured cache directory; the problem-radius table is loaded once.
class SuiteRunner {
 public:
  explicit SuiteRunner(RunConfig cfg);

  /// InputError for an unknown name. Library errors raised inside a suite are
  /// recorded as failures, not thrown.
  SuiteResult run(const std::string& name);

  std::shared_ptr<const KernelTable> problem_kernel();

 private:
  RunConfig cfg_;
  std::shared_ptr<const KernelTable> kernel_;
};

}  // namespace choquard::cli
