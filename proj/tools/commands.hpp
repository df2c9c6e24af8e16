#pragma once

#include <functional>
#include <iosfwd>

#include "choquard/kernels.hpp"
#include "config.hpp"

namespace choquard::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_convergence = 2,
  exit_verification = 3,
};

/// Measured asymptotic bracket c1 <= K(v) |v|_1^(N - alpha) <= c2 over
/// lo <= |v|_1 <= hi.
struct KernelBracket {
  double c1;
  double c2;
};
KernelBracket asymptotic_bracket(const KernelTable& table, int lo = 5, int hi = 30);

/// Builds or loads the kernel table and prints its bracket and cross-method
/// agreement.
int cmd_kernel(const RunConfig& cfg, std::ostream& out);
/// Ground state in the configured mode; writes report.json and solution.field.
int cmd_solve(const RunConfig& cfg, std::ostream& out);
/// Lambda sweep; writes sweep.csv, m_lambda.dat, w22_dist.dat and sweep_report.json.
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
/// Runs the selected suites; writes verify_report.json.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

/// Calls `command`, turning escaped exceptions into "error: ..." lines on `err`
/// and the matching exit code.
int run_guarded(const std::function<int()>& command, std::ostream& err);

}  // namespace choquard::cli
