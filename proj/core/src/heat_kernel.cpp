#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "choquard/errors.hpp"
#include "choquard/kernels.hpp"
#include "choquard/log.hpp"

namespace choquard {

namespace {

constexpr int kBesselNodes = 64;
// exp(-46) ~ 1e-20: integrand cutoff in the angular variable
constexpr double kAngularCut = 46.0;
// oscillation periods of cos(m th) per Gauss panel
constexpr double kPeriodsPerPanel = 6.0;

}  // namespace

double scaled_bessel_i(int order, double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) {
    throw InputError("scaled_bessel_i: argument must be finite and >= 0");
  }
  const int m = std::abs(order);
  if (z == 0.0) return m == 0 ? 1.0 : 0.0;

  constexpr double pi = std::numbers::pi;
  // 1 - cos th >= 2 th^2 / pi^2 on [0, pi]
  double theta_max = pi;
  if (2.0 * z > kAngularCut) theta_max = std::min(pi, pi * std::sqrt(kAngularCut / (2.0 * z)));
  const int panels = 1 + static_cast<int>(m * theta_max / (2.0 * pi * kPeriodsPerPanel));

  const GaussRule& g = gauss_legendre(kBesselNodes);
  const double h = theta_max / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double th = lo + 0.5 * h * (g.nodes[i] + 1.0);
      const double half = std::sin(0.5 * th);
      panel += g.weights[i] * std::exp(-2.0 * z * half * half) * std::cos(m * th);
    }
    sum += 0.5 * h * panel;
  }
  return std::max(0.0, sum / pi);
}

double heat_kernel_1d(double t, int m) {
  if (!(t >= 0.0)) throw InputError("heat_kernel: t must be >= 0");
  return scaled_bessel_i(m, 2.0 * t);
}

double heat_kernel(double t, std::span<const int> v) {
  if (!(t >= 0.0)) throw InputError("heat_kernel: t must be >= 0");
  if (v.empty()) throw InputError("heat_kernel: empty offset");
  double k = 1.0;
  for (int c : v) {
    k *= heat_kernel_1d(t, c);
    if (k == 0.0) break;
  }
  return k;
}

double heat_kernel_tail_bound(double t, int radius, int dim) {
  if (!(t >= 0.0)) throw InputError("heat_kernel_tail_bound: t must be >= 0");
  if (dim < 1) throw InputError("heat_kernel_tail_bound: dim must be >= 1");
  if (radius < 0) return 1.0;
  if (t == 0.0) return 0.0;
  // P(|X|_1 >= n) <= (2 exp(2t (cosh s - 1)))^N e^{-s n}, minimised at
  // sinh s = n / (2 N t).
  const double n = radius + 1.0;
  const double s = std::asinh(n / (2.0 * dim * t));
  const double log_bound =
      dim * (std::numbers::ln2 + 2.0 * t * (std::cosh(s) - 1.0)) - s * n;
  return std::min(1.0, std::exp(log_bound));
}

double heat_kernel_spectral(double t, std::span<const int> v, int torus_size) {
  if (!(t >= 0.0)) throw InputError("heat_kernel_spectral: t must be >= 0");
  if (torus_size < 1) throw InputError("heat_kernel_spectral: torus size must be >= 1");
  const int dim = static_cast<int>(v.size());
  if (dim < 1) throw InputError("heat_kernel_spectral: empty offset");
  const int L = torus_size;

  int vmax = 0;
  for (int c : v) vmax = std::max(vmax, std::abs(c));
  const double wrap = dim * heat_kernel_tail_bound(t, L - vmax - 1, 1);
  if (wrap > 1e-8) {
    warn("heat_kernel_spectral: torus size " + std::to_string(L) + " too small for t = " +
         std::to_string(t) + " (wrap-around mass bound " + std::to_string(wrap) + ")");
  }

  constexpr double pi = std::numbers::pi;
  std::vector<double> decay(static_cast<std::size_t>(L));
  std::vector<double> cosine(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) {
    const double s = std::sin(pi * k / L);
    decay[static_cast<std::size_t>(k)] = std::exp(-4.0 * t * s * s);
    cosine[static_cast<std::size_t>(k)] = std::cos(2.0 * pi * k / L);
  }
  std::vector<int> vm(v.begin(), v.end());
  for (int& c : vm) c = ((c % L) + L) % L;

  // iterate theta = (2 pi / L) k over {0..L-1}^N; phase index = k . v mod L
  std::vector<int> k(static_cast<std::size_t>(dim), 0);
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    long phase = 0;
    for (int a = 0; a < dim; ++a) {
      weight *= decay[static_cast<std::size_t>(k[static_cast<std::size_t>(a)])];
      phase += static_cast<long>(k[static_cast<std::size_t>(a)]) * vm[static_cast<std::size_t>(a)];
    }
    sum += weight * cosine[static_cast<std::size_t>(phase % L)];
    int a = dim - 1;
    while (a >= 0 && ++k[static_cast<std::size_t>(a)] == L) k[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return sum / std::pow(static_cast<double>(L), dim);
}

Field heat_semigroup(const Field& u, double t) {
  if (!(t >= 0.0)) throw InputError("heat_semigroup: t must be >= 0");
  if (t == 0.0) return u;
  const LatticeWindow& w = u.window();
  const int E = w.extent();
  // 1-D kernel on offsets 0..E-1, truncated where it is negligible
  std::vector<double> k1(static_cast<std::size_t>(E));
  int cut = E - 1;
  for (int m = 0; m < E; ++m) {
    k1[static_cast<std::size_t>(m)] = heat_kernel_1d(t, m);
    if (m > 0 && k1[static_cast<std::size_t>(m)] < 1e-30 * k1[0]) {
      cut = m - 1;
      break;
    }
  }
  std::vector<double> cur(u.values().begin(), u.values().end());
  std::vector<double> next(cur.size());
  for (int axis = 0; axis < w.dim(); ++axis) {
    const std::size_t stride = w.stride(axis);
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      const int c = static_cast<int>((idx / stride) % static_cast<std::size_t>(E));
      const std::size_t base = idx - static_cast<std::size_t>(c) * stride;
      const int lo = std::max(0, c - cut);
      const int hi = std::min(E - 1, c + cut);
      double s = 0.0;
      for (int j = lo; j <= hi; ++j) {
        s += k1[static_cast<std::size_t>(std::abs(c - j))] * cur[base + static_cast<std::size_t>(j) * stride];
      }
      next[idx] = s;
    }
    cur.swap(next);
  }
  return Field(w, std::move(cur));
}

}  // namespace choquard
