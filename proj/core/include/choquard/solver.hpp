#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/field.hpp"
#include "choquard/variational.hpp"

namespace choquard {

enum class Initializer { well_bump, random_positive, supplied };

std::string to_string(Initializer init);
Initializer parse_initializer(const std::string& name);

struct SolverConfig {
  int max_iterations = 500;
  /// Stop when both the dual residual and the coordinate residual fall below
  /// residual_tol |u|.
  double residual_tol = 1e-8;
  /// Stop only when |F(u)| <= nehari_tol |u|^2.
  double nehari_tol = 1e-10;
  double cg_tol = 1e-10;
  int cg_max_iterations = 5000;
  /// Backtracking: step *= shrink until J drops by armijo * step * |J'(u)|_*^2.
  double shrink = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-12;
  Initializer initializer = Initializer::well_bump;
  /// Additional random-positive starts.
  int restarts = 5;
  std::uint64_t seed = 1;

  void validate() const;
};

struct IterationRecord {
  int iteration;
  double energy;
  double dual_residual;
  double coord_residual;
  double nehari_F;
  double norm_sq;
  double step;
};

struct SolveResult {
  Field u;
  double level;
  double norm_sq;
  double dual_residual;
  double coord_residual;
  /// |F(u)| / |u|^2.
  double nehari_defect;
  int iterations;
  bool converged;
  std::vector<IterationRecord> history;
  /// Final level of every start, in start order; NaN for a failed start.
  std::vector<double> start_levels;
  std::vector<std::string> start_labels;
  int best_start = 0;
};

/// A descent that stagnated or ran out of iterations, with its trajectory.
class SolveFailed : public ConvergenceError {
 public:
  SolveFailed(const std::string& what, double residual, std::vector<IterationRecord> history)
      : ConvergenceError(what, residual), history_(std::move(history)) {}
  const std::vector<IterationRecord>& history() const noexcept { return history_; }

 private:
  std::vector<IterationRecord> history_;
};

/// Jacobi-preconditioned conjugate gradients for A x = rhs on the unknowns.
/// Throws ConvergenceError (carrying the relative residual) when the
/// iteration budget runs out.
Field cg_solve(const Field& rhs, const ProblemSpec& prob, const SolverConfig& cfg,
               int* iterations = nullptr);

/// |g|_* = sqrt(<g, A^{-1} g>), the norm of a coordinate gradient as a
/// functional on the problem space.
double dual_norm(const Field& g, const ProblemSpec& prob, const SolverConfig& cfg);

/// Starting field of the given kind, zero off the unknowns. well_bump is the
/// indicator of the well smoothed by the heat semigroup at t = 1;
/// random_positive draws U(0, 1) on the unknowns inside the sublevel set
/// {a <= M} and leaves the rest zero.
Field initial_field(Initializer kind, const ProblemSpec& prob, std::uint64_t seed);

/// Nehari-projected descent along the Riesz representative of J' from u0.
/// Throws InitializerError if D(u0) = 0 and SolveFailed on stagnation or
/// when the iteration budget runs out.
SolveResult descend(const ProblemSpec& prob, const SolverConfig& cfg, const Field& u0);

/// Least level over the configured initializer, `cfg.restarts` random-positive
/// starts and any extra `warm_starts`. `supplied` is required when the
/// initializer is `supplied`. When every start fails, rethrows the SolveFailed
/// of the last one (InitializerError if none could be projected).
SolveResult ground_state(const ProblemSpec& prob, const SolverConfig& cfg,
                         const std::optional<Field>& supplied = std::nullopt,
                         const std::vector<Field>& warm_starts = {});

struct SweepRow {
  double lambda;
  bool converged;
  std::string failure;
  double level = 0.0;
  /// min over signs of |u_lambda -+ u_Omega|_{W^{2,2}}, and the same divided
  /// by |u_Omega|_{W^{2,2}}.
  double w22_dist = 0.0;
  double w22_rel = 0.0;
  /// sum over the complement of the well of lambda a u^2, and of (1 + lambda a) u^2.
  double outside_mass = 0.0;
  double outside_mass_weighted = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> start_levels;
};

struct ConvergenceReport {
  std::vector<SweepRow> rows;
  double omega_level;
  double omega_w22_norm;
  int omega_iterations;
  double omega_residual;
  bool levels_nondecreasing;
  bool levels_below_omega;
  double final_level_gap;
  bool distance_decreasing;
  bool outside_mass_decreasing;
  bool all_converged;
};

/// Solves the dirichlet problem once and the full problem for each lambda of
/// the strictly increasing grid, warm-starting from the dirichlet solution and
/// the previous row. Failed rows are marked, not thrown. `tol` is the relative
/// slack of the ordering verdicts.
ConvergenceReport lambda_sweep(const ProblemSpec& full_template, const std::vector<double>& grid,
                               const SolverConfig& cfg, double tol = 1e-8);

struct PsDiagnostics {
  /// max over iterates of |J - F/(2p) - (1/2 - 1/(2p)) |u|^2| / |u|^2.
  double identity_error;
  /// | |u_final|^2 - 2p m / (p - 1) | / |u_final|^2.
  double limit_error;
  double level;
};

PsDiagnostics ps_monitor(const std::vector<IterationRecord>& history, double p);

struct BrezisLiebRow {
  Site shift;
  int distance;
  /// |D(u_n) - D(u_n - u) - D(u)| with u_n = u + v(. - z).
  double nonlocal_defect;
  /// |u_n|^2 - |u_n - u|^2 - |u|^2 in W^{2,2}.
  double norm_defect;
};

/// Throws InputError when a shifted bump leaves the window.
std::vector<BrezisLiebRow> brezis_lieb_probe(const Field& u, const Field& v,
                                             const std::vector<Site>& shifts,
                                             const ProblemSpec& prob);

}  // namespace choquard
