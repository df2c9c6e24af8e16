#pragma once

#include <string>

#include "choquard/field.hpp"
#include "choquard/kernels.hpp"
#include "choquard/lattice.hpp"

namespace choquard {

// Local operators. Results live on the window enlarged by the stencil reach,
// so nothing is lost at the window edge.

/// Delta u(x) = sum_{y ~ x} (u(y) - u(x)), on the window enlarged by 1.
Field laplacian(const Field& u);
/// Gamma(u, v)(x) = 1/2 sum_{y ~ x} (u(y) - u(x)) (v(y) - v(x)), on the window enlarged by 1.
Field gradient_form(const Field& u, const Field& v);
/// |grad u| = sqrt(Gamma(u, u)).
Field gradient_length(const Field& u);
/// Delta(Delta u), on the window enlarged by 2.
Field biharmonic(const Field& u);

/// Delta u evaluated on u's own window, reading zeros outside it. Exact on
/// sites whose neighbours all lie in the window or carry zero.
Field laplacian_in_place(const Field& u);

enum class PotentialProfile { distance, capped, quadratic };

std::string to_string(PotentialProfile profile);
PotentialProfile parse_potential_profile(const std::string& name);

/// Potential a(x) >= 0 vanishing exactly on the well. Profiles, with d the
/// word distance to the well:
///   distance   a = d
///   capped     a = min(d, cap)
///   quadratic  a = d^2
struct PotentialSpec {
  SiteSet well;
  /// Level M whose sublevel set {a <= M} must be finite.
  double bound = 1.0;
  PotentialProfile profile = PotentialProfile::distance;
  double cap = 0.0;

  PotentialSpec(SiteSet well_, double bound_ = 1.0,
                PotentialProfile profile_ = PotentialProfile::distance, double cap_ = 0.0);

  /// Well nonempty, connected and bounded; M > 0; {a <= M} finite, which for
  /// the capped profile needs cap > M. Throws ParameterError.
  void validate() const;

  double operator()(std::span<const int> x) const;

  /// {x : a(x) <= level}, built by dilating the well. Throws DomainError when
  /// the set is infinite.
  SiteSet sublevel_set(double level) const;

  /// a sampled on every site of `window`.
  Field on(const LatticeWindow& window) const;
};

/// Sum over Z^N of |Delta u|^2 + Gamma(u, u) + (1 + lambda a) u^2.
double elambda_norm_sq(const Field& u, const PotentialSpec& pot, double lambda);
/// Polarised inner product of the same norm.
double elambda_inner(const Field& u, const Field& v, const PotentialSpec& pot, double lambda);
/// Sum over Z^N of |Delta u|^2 + Gamma(u, u) + u^2.
double w22_norm_sq(const Field& u);
/// sum Delta u Delta v + Gamma(u, v) + u v; zero term by term when the
/// stencils of u and v do not meet.
double w22_inner(const Field& u, const Field& v);
/// Sum over the closure of omega of |Delta u|^2 + Gamma(u, u), plus the sum
/// over omega of u^2. Requires supp u inside omega (InputError otherwise).
double omega_norm_sq(const Field& u, const SiteSet& omega);

/// Smallest admissible exponent (N + alpha) / N is excluded.
void validate_exponent(double p, int dim, double alpha);

/// D(u) = sum_{x != y} K(x - y) |u(y)|^p |u(x)|^p.
double nonlocal_energy(const Field& u, const KernelTable& kernel, double p);

/// sum (K * u) v / (|u|_r |v|_s) with 1/r + 1/s + (N - alpha)/N = 2, diagonal
/// excluded. u, v >= 0.
double hls_ratio(const Field& u, const Field& v, const KernelTable& kernel, double r, double s);

/// |u|_t^t <= |u|_s^s |u|_inf^(t - s), up to round-off, for 1 <= s < t.
bool interpolation_check(const Field& u, double s, double t);

}  // namespace choquard
