#include <cmath>

#include "choquard/calculus.hpp"
#include "choquard/errors.hpp"
#include "choquard/kernels.hpp"

namespace choquard {

Field convolve(const KernelTable& kernel, const Field& f, bool include_diagonal) {
  return convolve(kernel, f, f.window(), include_diagonal);
}

Field convolve(const KernelTable& kernel, const Field& f, const LatticeWindow& target,
               bool include_diagonal) {
  const LatticeWindow& src = f.window();
  if (src.dim() != kernel.dim() || target.dim() != kernel.dim())
    throw InputError("convolve: dimension mismatch");
  if (!target.is_box()) throw InputError("convolve: box target window required");
  const int r = kernel.range();
  if (src.radius() + target.radius() > r) {
    throw InternalError("convolve: kernel table of range " + std::to_string(r) +
                        " cannot reach between windows of radius " +
                        std::to_string(src.radius()) + " and " + std::to_string(target.radius()));
  }
  const int dim = kernel.dim();
  const auto dense = kernel.dense();

  // dense index of x - y is base(x) - shift(y)
  std::vector<std::ptrdiff_t> shift;
  std::vector<double> weight;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] == 0.0) continue;
    const Site y = src.site(j);
    std::ptrdiff_t s = 0;
    for (int a = 0; a < dim; ++a)
      s += static_cast<std::ptrdiff_t>(y[static_cast<std::size_t>(a)]) *
           static_cast<std::ptrdiff_t>(kernel.dense_stride(a));
    shift.push_back(s);
    weight.push_back(f[j]);
  }

  std::ptrdiff_t centre = 0;
  for (int a = 0; a < dim; ++a)
    centre += static_cast<std::ptrdiff_t>(r) * static_cast<std::ptrdiff_t>(kernel.dense_stride(a));

  Field out(target);
  const bool skip_diagonal = !include_diagonal || !kernel.has_diagonal();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Site x = target.site(i);
    std::ptrdiff_t base = centre;
    for (int a = 0; a < dim; ++a)
      base += static_cast<std::ptrdiff_t>(x[static_cast<std::size_t>(a)]) *
              static_cast<std::ptrdiff_t>(kernel.dense_stride(a));
    double s = 0.0;
    for (std::size_t k = 0; k < shift.size(); ++k) {
      const std::ptrdiff_t idx = base - shift[k];
      if (skip_diagonal && idx == centre) continue;
      s += dense[static_cast<std::size_t>(idx)] * weight[k];
    }
    out[i] = s;
  }
  return out;
}

namespace {

// (-Delta)^s u for s in (0, 1) on u's window.
Field fractional_power(double s, const Field& u, const QuadratureSpec& quad) {
  const LatticeWindow& w = u.window();
  const double t_tail = effective_tail_start(quad, w.extent(), w.dim());
  // Past t_tail the -u t^(-1-s) part is integrated exactly and the rule is
  // fitted to the heat term alone, which decays like t^(-N/2-1-s).
  const auto rule = subordination_rule(1.0 - s, 0.5 * w.dim() + s, quad, t_tail);

  // For small t, e^{t Delta} u - u is summed from its Taylor series instead of
  // being formed as a difference, which would lose every digit as t -> 0.
  constexpr int terms = 24;
  const double t_series = 0.125 / w.dim();
  std::vector<Field> powers;
  Field d = u.on_window(w.enlarged(terms));
  for (int k = 1; k <= terms; ++k) {
    d = laplacian_in_place(d);
    powers.push_back(d.restricted_to(w));
  }

  std::vector<double> acc(u.size(), 0.0);
  for (const auto& node : rule) {
    const double c = node.weight * std::pow(node.t, -1.0 - s);
    if (node.t <= t_series) {
      double coef = 1.0;
      for (int k = 1; k <= terms; ++k) {
        coef *= node.t / k;
        const Field& p = powers[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * coef * p[i];
      }
      continue;
    }
    const Field h = heat_semigroup(u, node.t);
    const bool tail = node.t > t_tail;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * (tail ? h[i] : h[i] - u[i]);
  }
  const double tail_mass = std::pow(t_tail, -s) / s;
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= tail_mass * u[i];
  // Gamma(-s) < 0 on (0, 1), which makes the operator positive
  const double g = std::tgamma(-s);
  for (double& v : acc) v /= g;
  return Field(w, std::move(acc));
}

}  // namespace

Field fractional_laplacian(double alpha, const Field& u, const QuadratureSpec& quad) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ParameterError("fractional_laplacian: alpha must be > 0");
  quad.validate();
  const double half = 0.5 * alpha;
  const int k = static_cast<int>(std::floor(half));
  const double s = half - k;

  // (-Delta)^k is applied exactly on a window large enough to hold its
  // support, so the fractional remainder sees the untruncated field.
  Field v = u.on_window(u.window().enlarged(k));
  for (int i = 0; i < k; ++i) v = laplacian_in_place(v) * -1.0;
  if (s > 0.0) v = fractional_power(s, v, quad);
  return v.restricted_to(u.window());
}

}  // namespace choquard
