#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "choquard/calculus.hpp"
#include "choquard/field.hpp"
#include "choquard/kernels.hpp"

namespace choquard {

/// full: the whole window is unknown and the potential enters with weight
/// lambda. dirichlet: unknowns are the well sites only, u vanishes elsewhere
/// and the potential term is dropped.
enum class Mode { full, dirichlet };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

/// One instance of the minimisation problem on a finite window. The discrete
/// problem is posed over fields supported in the window (full mode) or in the
/// well (dirichlet mode); every norm is the exact one on Z^N.
class ProblemSpec {
 public:
  ProblemSpec(Mode mode, LatticeWindow window, PotentialSpec potential,
              std::shared_ptr<const KernelTable> kernel, double p, double lambda);

  Mode mode() const noexcept { return mode_; }
  const LatticeWindow& window() const noexcept { return window_; }
  const PotentialSpec& potential() const noexcept { return potential_; }
  const KernelTable& kernel() const noexcept { return *kernel_; }
  std::shared_ptr<const KernelTable> kernel_ptr() const noexcept { return kernel_; }
  double p() const noexcept { return p_; }
  double lambda() const noexcept { return lambda_; }
  int dim() const noexcept { return window_.dim(); }

  /// 1 + lambda a on the window (1 in dirichlet mode).
  const Field& weight() const noexcept { return weight_; }
  /// a on the window.
  const Field& potential_values() const noexcept { return potential_values_; }
  /// 1 on unknown sites, 0 elsewhere.
  const Field& mask() const noexcept { return mask_; }
  std::size_t unknown_count() const noexcept { return unknowns_.size(); }
  const std::vector<std::size_t>& unknowns() const noexcept { return unknowns_; }

  ProblemSpec with_lambda(double lambda) const;
  ProblemSpec with_mode(Mode mode) const;

  /// Zero every non-unknown site.
  Field restrict(const Field& u) const;
  /// InputError unless u lives on this window and vanishes off the unknowns.
  void check_admissible(const Field& u) const;

 private:
  Mode mode_;
  LatticeWindow window_;
  PotentialSpec potential_;
  std::shared_ptr<const KernelTable> kernel_;
  double p_;
  double lambda_;
  Field weight_;
  Field potential_values_;
  Field mask_;
  std::vector<std::size_t> unknowns_;
};

/// A u = Delta^2 u - Delta u + w u on the window, w the problem weight, zeroed
/// off the unknowns. sum u A u equals the squared problem norm.
Field apply_quadratic_operator(const Field& u, const ProblemSpec& prob);

/// Diagonal of A on the unknowns (zero elsewhere).
Field quadratic_operator_diagonal(const ProblemSpec& prob);

/// Squared problem norm: E_lambda in full mode, E(Omega) in dirichlet mode.
double problem_norm_sq(const Field& u, const ProblemSpec& prob);

/// (K * |u|^p) |u|^(p-2) u, the derivative of D(u)/(2p).
Field nonlocal_gradient(const Field& u, const ProblemSpec& prob);

/// J(u) = 1/2 |u|^2 - D(u) / (2p).
double energy(const Field& u, const ProblemSpec& prob);

/// Coordinate gradient of J: A u - (K * |u|^p)|u|^(p-2) u on the unknowns.
Field euler_lagrange_residual(const Field& u, const ProblemSpec& prob);

/// F(u) = (J'(u), u) = |u|^2 - D(u).
double nehari_F(const Field& u, const ProblemSpec& prob);

struct NehariProjection {
  double t;
  Field u;
};

/// t0 = (|u|^2 / D(u))^(1 / (2(p-1))), the unique positive root of F(t u).
/// Throws NoProjection when D(u) = 0.
NehariProjection nehari_project(const Field& u, const ProblemSpec& prob);

/// J(u) for u on the Nehari manifold; throws DomainError when
/// |F(u)| > tol |u|^2.
double nehari_level(const Field& u, const ProblemSpec& prob, double tol = 1e-10);

/// J(c) - J(u) without forming either energy, stable when c is close to u:
/// 1/2 <c - u, A(c + u)> - <K * (|c|^p - |u|^p), |c|^p + |u|^p> / (2p).
double energy_difference(const Field& c, const Field& u, const ProblemSpec& prob);

struct MountainPassProbe {
  /// Least J over the sampled sphere |u| = rho.
  double theta_hat;
  double rho;
  /// Scale with J(t_neg w) < 0 for the witness w.
  double t_neg;
  Field witness;
};

/// Samples random fields on the unknowns scaled to |u| = rho. Throws
/// InconclusiveProbe if no sample has D > 0.
MountainPassProbe mountain_pass_probe(const ProblemSpec& prob, double rho, int samples,
                                      std::uint64_t seed);

/// sigma_hat = C_hat^(-1 / (2(p-1))), the lower bound on Nehari norms implied by
/// D(u) <= C_hat |u|^(2p).
double nehari_lower_bound(double c_hat, double p);

}  // namespace choquard
