#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace choquard {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, computed by Newton iteration on P_n and
/// memoised. Thread-safe.
const GaussRule& gauss_legendre(int n);

/// Time-axis discretisation for subordination integrals over (0, inf).
///
/// The axis is cut at t_split and t_tail. [0, t_split] and [t_tail, inf) are
/// mapped to [0, 1] by power substitutions matched to the integrand's
/// algebraic behaviour at each end, so both become smooth; [t_split, t_tail]
/// is integrated in log t over panels of width <= panel_width.
struct QuadratureSpec {
  double t_split = 1.0;
  /// 0 selects max(16 t_split, N rho^2), rho the largest coordinate offset.
  double t_tail = 0.0;
  int nodes = 64;
  double panel_width = 1.0;
  double eps = 1e-8;

  void validate() const;
  /// Same spec with twice the nodes per segment.
  QuadratureSpec refined() const;
  /// FNV-1a over the canonical text form.
  std::uint64_t hash() const;
  std::string canonical() const;

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

/// Tail start actually used for offsets up to `rho` in dimension `dim`.
double effective_tail_start(const QuadratureSpec& q, int rho, int dim);

struct QuadratureNode {
  double t;
  double weight;
};

/// Nodes and weights for integral_0^inf F(t) dt when F ~ t^(head_exponent-1)
/// near 0 and F ~ t^(-tail_exponent-1) near infinity (both exponents > 0).
std::vector<QuadratureNode> subordination_rule(double head_exponent, double tail_exponent,
                                               const QuadratureSpec& q, double t_tail);

}  // namespace choquard
