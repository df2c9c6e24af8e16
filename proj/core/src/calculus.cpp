#include "choquard/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "choquard/errors.hpp"

namespace choquard {

namespace {

// Visits the 2N neighbour slots of every site of a box window; `fn(i, j)` gets
// the neighbour index j or std::nullopt when it falls outside.
template <typename Fn>
void for_each_neighbor_slot(const LatticeWindow& w, std::size_t i, Fn&& fn) {
  const auto e = static_cast<std::size_t>(w.extent());
  for (int a = 0; a < w.dim(); ++a) {
    const std::size_t st = w.stride(a);
    const std::size_t c = (i / st) % e;
    fn(c + 1 < e ? std::optional<std::size_t>(i + st) : std::nullopt);
    fn(c > 0 ? std::optional<std::size_t>(i - st) : std::nullopt);
  }
}

Field gradient_form_same_window(const Field& u, const Field& v) {
  Field out(u.window());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double s = 0.0;
    for_each_neighbor_slot(u.window(), i, [&](std::optional<std::size_t> j) {
      const double du = (j ? u[*j] : 0.0) - u[i];
      const double dv = (j ? v[*j] : 0.0) - v[i];
      s += du * dv;
    });
    out[i] = 0.5 * s;
  }
  return out;
}

double sum_sq(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return s;
}

double sum(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s;
}

}  // namespace

Field laplacian_in_place(const Field& u) {
  Field out(u.window());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double s = 0.0;
    for_each_neighbor_slot(u.window(), i, [&](std::optional<std::size_t> j) {
      s += (j ? u[*j] : 0.0) - u[i];
    });
    out[i] = s;
  }
  return out;
}

Field laplacian(const Field& u) { return laplacian_in_place(u.on_window(u.window().enlarged(1))); }

Field gradient_form(const Field& u, const Field& v) {
  if (!(u.window() == v.window())) throw InputError("gradient_form: window mismatch");
  const LatticeWindow big = u.window().enlarged(1);
  return gradient_form_same_window(u.on_window(big), v.on_window(big));
}

Field gradient_length(const Field& u) {
  Field g = gradient_form(u, u);
  for (double& v : g.values()) v = std::sqrt(std::max(0.0, v));
  return g;
}

Field biharmonic(const Field& u) {
  return laplacian_in_place(laplacian_in_place(u.on_window(u.window().enlarged(2))));
}

std::string to_string(PotentialProfile profile) {
  switch (profile) {
    case PotentialProfile::distance: return "distance";
    case PotentialProfile::capped: return "capped";
    case PotentialProfile::quadratic: return "quadratic";
  }
  return "unknown";
}

PotentialProfile parse_potential_profile(const std::string& name) {
  if (name == "distance") return PotentialProfile::distance;
  if (name == "capped") return PotentialProfile::capped;
  if (name == "quadratic") return PotentialProfile::quadratic;
  throw InputError("unknown potential profile '" + name + "'");
}

PotentialSpec::PotentialSpec(SiteSet well_, double bound_, PotentialProfile profile_, double cap_)
    : well(std::move(well_)), bound(bound_), profile(profile_), cap(cap_) {}

void PotentialSpec::validate() const {
  if (well.empty()) throw ParameterError("potential: the well must be nonempty");
  if (!(bound > 0.0) || !std::isfinite(bound))
    throw ParameterError("potential: the bound M must be a positive number");
  if (profile == PotentialProfile::capped && !(cap > bound))
    throw ParameterError("potential: capped profile needs cap > M for {a <= M} to be finite");

  // connectivity by breadth-first search inside the well
  SiteSet seen(well.dim());
  std::deque<Site> queue{*well.begin()};
  seen.insert(*well.begin());
  while (!queue.empty()) {
    Site x = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < x.size(); ++a) {
      for (int d : {1, -1}) {
        Site y = x;
        y[a] += d;
        if (well.contains(y) && seen.insert(y)) queue.push_back(y);
      }
    }
  }
  if (seen.size() != well.size()) throw ParameterError("potential: the well must be connected");
}

double PotentialSpec::operator()(std::span<const int> x) const {
  const double d = distance_to_set(x, well);
  switch (profile) {
    case PotentialProfile::distance: return d;
    case PotentialProfile::capped: return std::min(d, cap);
    case PotentialProfile::quadratic: return d * d;
  }
  return d;
}

SiteSet PotentialSpec::sublevel_set(double level) const {
  if (level < 0.0) return SiteSet(well.dim());
  if (profile == PotentialProfile::capped && level >= cap)
    throw DomainError("potential: sublevel set at or above the cap is infinite");
  const double reach = profile == PotentialProfile::quadratic ? std::sqrt(level) : level;
  const int layers = static_cast<int>(std::floor(reach));
  SiteSet out = well;
  for (int k = 0; k < layers; ++k) out = closure(out);
  return out;
}

Field PotentialSpec::on(const LatticeWindow& window) const {
  Field f(window);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = (*this)(window.site(i));
  return f;
}

double elambda_norm_sq(const Field& u, const PotentialSpec& pot, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("elambda_norm_sq: lambda must be >= 0");
  double zero_order = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    zero_order += (1.0 + lambda * pot(u.window().site(i))) * u[i] * u[i];
  }
  return sum_sq(laplacian(u)) + sum(gradient_form(u, u)) + zero_order;
}

double elambda_inner(const Field& u, const Field& v, const PotentialSpec& pot, double lambda) {
  return 0.25 * (elambda_norm_sq(u + v, pot, lambda) - elambda_norm_sq(u - v, pot, lambda));
}

double w22_norm_sq(const Field& u) {
  return sum_sq(laplacian(u)) + sum(gradient_form(u, u)) + sum_sq(u);
}

double w22_inner(const Field& u, const Field& v) {
  return dot(laplacian(u), laplacian(v)) + sum(gradient_form(u, v)) + dot(u, v);
}

double omega_norm_sq(const Field& u, const SiteSet& omega) {
  if (omega.dim() != u.window().dim()) throw InputError("omega_norm_sq: dimension mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0 && !omega.contains(u.window().site(i)))
      throw InputError("omega_norm_sq: u is not supported in omega");
  }
  const Field lap = laplacian(u);
  const Field gam = gradient_form(u, u);
  double s = 0.0;
  for (const auto& x : closure(omega)) {
    const double l = lap.at(x);
    s += l * l + gam.at(x);
  }
  for (const auto& x : omega) {
    const double v = u.at(x);
    s += v * v;
  }
  return s;
}

void validate_exponent(double p, int dim, double alpha) {
  const double p_min = (dim + alpha) / dim;
  if (!(p > p_min) || !std::isfinite(p)) {
    throw ParameterError("p must exceed (N + alpha) / N = " + format_double(p_min) +
                         ": got p = " + format_double(p));
  }
}

double nonlocal_energy(const Field& u, const KernelTable& kernel, double p) {
  validate_exponent(p, kernel.dim(), kernel.alpha());
  const Field f = abs_pow(u, p);
  return dot(convolve(kernel, f, false), f);
}

double hls_ratio(const Field& u, const Field& v, const KernelTable& kernel, double r, double s) {
  if (!(r >= 1.0) || !(s >= 1.0)) throw ParameterError("hls_ratio: r and s must be >= 1");
  const int n = kernel.dim();
  const double relation = 1.0 / r + 1.0 / s + (n - kernel.alpha()) / n;
  if (std::abs(relation - 2.0) > 1e-12)
    throw ParameterError("hls_ratio: exponents violate 1/r + 1/s + (N - alpha)/N = 2");
  for (const Field* f : {&u, &v})
    for (double x : f->values())
      if (x < 0.0) throw InputError("hls_ratio: fields must be nonnegative");
  const double den = lp_norm(u, r) * lp_norm(v, s);
  if (den == 0.0) throw DomainError("hls_ratio: zero denominator");
  return dot(convolve(kernel, u, v.window(), false), v) / den;
}

bool interpolation_check(const Field& u, double s, double t) {
  if (!(s >= 1.0) || !(t > s) || !std::isfinite(t))
    throw InputError("interpolation_check: need 1 <= s < t < inf");
  double lhs = 0.0, base = 0.0;
  for (double v : u.values()) {
    lhs += std::pow(std::abs(v), t);
    base += std::pow(std::abs(v), s);
  }
  const double rhs = base * std::pow(sup_norm(u), t - s);
  return lhs <= rhs * (1.0 + 64 * std::numeric_limits<double>::epsilon());
}

}  // namespace choquard
