#include "choquard/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "choquard/errors.hpp"
#include "choquard/field.hpp"

namespace choquard {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw InputError("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    if (n == 1) {
      slot = std::make_unique<GaussRule>(GaussRule{{0.0}, {2.0}});
    } else {
      slot = std::make_unique<GaussRule>(compute_gauss_legendre(n));
    }
  }
  return *slot;
}

void QuadratureSpec::validate() const {
  if (!(t_split > 0.0)) throw ParameterError("quadrature: t_split must be > 0");
  if (t_tail != 0.0 && !(t_tail > t_split))
    throw ParameterError("quadrature: t_tail must exceed t_split");
  if (nodes < 8) throw ParameterError("quadrature: at least 8 nodes per segment required");
  if (!(panel_width > 0.0)) throw ParameterError("quadrature: panel_width must be > 0");
  if (!(eps > 0.0)) throw ParameterError("quadrature: eps must be > 0");
}

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec q = *this;
  q.nodes *= 2;
  return q;
}

std::string QuadratureSpec::canonical() const {
  std::ostringstream os;
  os << "t_split=" << format_double(t_split) << " t_tail=" << format_double(t_tail)
     << " nodes=" << nodes << " panel_width=" << format_double(panel_width)
     << " eps=" << format_double(eps);
  return os.str();
}

std::uint64_t QuadratureSpec::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double effective_tail_start(const QuadratureSpec& q, int rho, int dim) {
  if (q.t_tail > 0.0) return q.t_tail;
  const double r = std::max(1, rho);
  return std::max(16.0 * q.t_split, dim * r * r);
}

std::vector<QuadratureNode> subordination_rule(double head_exponent, double tail_exponent,
                                               const QuadratureSpec& q, double t_tail) {
  q.validate();
  if (!(head_exponent > 0.0) || !(tail_exponent > 0.0))
    throw ParameterError("subordination_rule: exponents must be positive");
  if (!(t_tail > q.t_split)) throw ParameterError("subordination_rule: t_tail <= t_split");
  const GaussRule& g = gauss_legendre(q.nodes);
  std::vector<QuadratureNode> out;

  // [0, t1]: t = t1 s^(1/a)
  const double a = head_exponent;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double s = 0.5 * (g.nodes[i] + 1.0);
    const double w = 0.5 * g.weights[i];
    const double t = q.t_split * std::pow(s, 1.0 / a);
    out.push_back({t, w * (q.t_split / a) * std::pow(s, 1.0 / a - 1.0)});
  }

  // [t1, T]: log-spaced panels
  const double x0 = std::log(q.t_split);
  const double x1 = std::log(t_tail);
  const int panels = std::max(1, static_cast<int>(std::ceil((x1 - x0) / q.panel_width)));
  const double h = (x1 - x0) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = x0 + p * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double x = lo + 0.5 * h * (g.nodes[i] + 1.0);
      const double t = std::exp(x);
      out.push_back({t, 0.5 * h * g.weights[i] * t});
    }
  }

  // [T, inf): t = T w^(-1/b)
  const double b = tail_exponent;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double w = 0.5 * (g.nodes[i] + 1.0);
    const double wt = 0.5 * g.weights[i];
    const double t = t_tail * std::pow(w, -1.0 / b);
    out.push_back({t, wt * (t_tail / b) * std::pow(w, -1.0 / b - 1.0)});
  }
  return out;
}

}  // namespace choquard
