#include "choquard/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "choquard/errors.hpp"

namespace choquard {

std::string to_string(Mode mode) { return mode == Mode::full ? "full" : "dirichlet"; }

Mode parse_mode(const std::string& name) {
  if (name == "full") return Mode::full;
  if (name == "dirichlet") return Mode::dirichlet;
  throw InputError("unknown mode '" + name + "' (expected full or dirichlet)");
}

ProblemSpec::ProblemSpec(Mode mode, LatticeWindow window, PotentialSpec potential,
                         std::shared_ptr<const KernelTable> kernel, double p, double lambda)
    : mode_(mode),
      window_(window),
      potential_(std::move(potential)),
      kernel_(std::move(kernel)),
      p_(p),
      lambda_(lambda),
      weight_(window),
      potential_values_(window),
      mask_(window) {
  if (!window_.is_box()) throw InputError("problem: box window required");
  if (!kernel_) throw InputError("problem: kernel table missing");
  if (kernel_->dim() != window_.dim()) throw InputError("problem: kernel dimension mismatch");
  if (!kernel_->covers(window_)) {
    throw InputError("problem: kernel table built for radius " +
                     std::to_string(kernel_->window_radius()) + " cannot serve radius " +
                     std::to_string(window_.radius()));
  }
  if (potential_.well.dim() != window_.dim()) throw InputError("problem: well dimension mismatch");
  potential_.validate();
  validate_exponent(p_, window_.dim(), kernel_->alpha());
  if (mode_ == Mode::full && !(lambda_ > 0.0 && std::isfinite(lambda_)))
    throw ParameterError("problem: lambda must be > 0 in full mode");
  if (potential_.well.max_abs_coordinate() > window_.radius() - 3)
    throw InputError("problem: the well must keep distance >= 3 from the window edge");

  potential_values_ = potential_.on(window_);
  for (std::size_t i = 0; i < window_.size(); ++i) {
    const bool inside = potential_values_[i] == 0.0;
    const bool unknown = mode_ == Mode::full || inside;
    mask_[i] = unknown ? 1.0 : 0.0;
    if (unknown) unknowns_.push_back(i);
    weight_[i] = mode_ == Mode::full ? 1.0 + lambda_ * potential_values_[i] : 1.0;
  }
}

ProblemSpec ProblemSpec::with_lambda(double lambda) const {
  return ProblemSpec(mode_, window_, potential_, kernel_, p_, lambda);
}

ProblemSpec ProblemSpec::with_mode(Mode mode) const {
  return ProblemSpec(mode, window_, potential_, kernel_, p_, lambda_);
}

Field ProblemSpec::restrict(const Field& u) const {
  if (!(u.window() == window_)) throw InputError("problem: field window mismatch");
  Field out(window_);
  for (std::size_t i : unknowns_) out[i] = u[i];
  return out;
}

void ProblemSpec::check_admissible(const Field& u) const {
  if (!(u.window() == window_)) throw InputError("problem: field window mismatch");
  if (mode_ == Mode::full) return;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0 && mask_[i] == 0.0)
      throw InputError("problem: dirichlet mode needs supp u inside the well");
  }
}

Field apply_quadratic_operator(const Field& u, const ProblemSpec& prob) {
  prob.check_admissible(u);
  const Field l1 = laplacian_in_place(u.on_window(prob.window().enlarged(2)));
  const Field l2 = laplacian_in_place(l1);
  Field out(prob.window());
  const auto& w = prob.weight();
  const auto& m = prob.mask();
  const LatticeWindow& big = l1.window();
  // the window is the centred sub-box of `big`
  const int dim = prob.dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (m[i] == 0.0) continue;
    std::size_t rem = i, j = 0;
    for (int a = 0; a < dim; ++a) {
      const std::size_t c = rem / prob.window().stride(a);
      rem %= prob.window().stride(a);
      j += (c + 2) * big.stride(a);
    }
    out[i] = l2[j] - l1[j] + w[i] * u[i];
  }
  return out;
}

Field quadratic_operator_diagonal(const ProblemSpec& prob) {
  const double n = prob.dim();
  Field d(prob.window());
  for (std::size_t i : prob.unknowns()) d[i] = 4.0 * n * n + 4.0 * n + prob.weight()[i];
  return d;
}

double problem_norm_sq(const Field& u, const ProblemSpec& prob) {
  return dot(u, apply_quadratic_operator(u, prob));
}

Field nonlocal_gradient(const Field& u, const ProblemSpec& prob) {
  prob.check_admissible(u);
  const double p = prob.p();
  const Field f = abs_pow(u, p);
  const Field c = convolve(prob.kernel(), f, false);
  Field g(prob.window());
  for (std::size_t i : prob.unknowns()) {
    const double a = std::abs(u[i]);
    if (a == 0.0) continue;
    const double mag = p == 2.0 ? a : std::pow(a, p - 1.0);
    g[i] = c[i] * std::copysign(mag, u[i]);
  }
  return g;
}

double energy(const Field& u, const ProblemSpec& prob) {
  const double n = problem_norm_sq(u, prob);
  return 0.5 * n - nonlocal_energy(u, prob.kernel(), prob.p()) / (2.0 * prob.p());
}

Field euler_lagrange_residual(const Field& u, const ProblemSpec& prob) {
  return apply_quadratic_operator(u, prob) - nonlocal_gradient(u, prob);
}

double nehari_F(const Field& u, const ProblemSpec& prob) {
  return problem_norm_sq(u, prob) - nonlocal_energy(u, prob.kernel(), prob.p());
}

NehariProjection nehari_project(const Field& u, const ProblemSpec& prob) {
  const double a = problem_norm_sq(u, prob);
  const double b = nonlocal_energy(u, prob.kernel(), prob.p());
  if (!(b > 0.0)) {
    throw NoProjection(
        "nehari_project: the nonlocal term vanishes (a field supported on a single site "
        "has D(u) = 0), so no scaling reaches the Nehari manifold");
  }
  const double t = std::pow(a / b, 1.0 / (2.0 * (prob.p() - 1.0)));
  return {t, u * t};
}

double nehari_level(const Field& u, const ProblemSpec& prob, double tol) {
  const double n = problem_norm_sq(u, prob);
  const double d = nonlocal_energy(u, prob.kernel(), prob.p());
  if (n == 0.0) throw DomainError("nehari_level: u = 0 is not on the Nehari manifold");
  if (std::abs(n - d) > tol * n) {
    throw DomainError("nehari_level: Nehari defect " + format_double((n - d) / n) +
                      " exceeds tolerance");
  }
  return 0.5 * n - d / (2.0 * prob.p());
}

double energy_difference(const Field& c, const Field& u, const ProblemSpec& prob) {
  const double p = prob.p();
  const Field diff = c - u;
  const double quad = 0.5 * dot(diff, apply_quadratic_operator(c + u, prob));

  Field dpow(prob.window()), spow(prob.window());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double a = std::abs(c[i]), b = std::abs(u[i]);
    const double pa = a == 0.0 ? 0.0 : std::pow(a, p);
    const double pb = b == 0.0 ? 0.0 : std::pow(b, p);
    spow[i] = pa + pb;
    if (a > 0.0 && b > 0.0 && std::signbit(c[i]) == std::signbit(u[i])) {
      // |c| - |u| is +-diff exactly, so only the expm1/log1p step rounds
      const double rel = (c[i] > 0.0 ? diff[i] : -diff[i]) / b;
      dpow[i] = pb * std::expm1(p * std::log1p(rel));
    } else {
      dpow[i] = pa - pb;
    }
  }
  const double dd = dot(convolve(prob.kernel(), dpow, false), spow);
  return quad - dd / (2.0 * p);
}

MountainPassProbe mountain_pass_probe(const ProblemSpec& prob, double rho, int samples,
                                      std::uint64_t seed) {
  if (!(rho > 0.0)) throw ParameterError("mountain_pass_probe: rho must be > 0");
  if (samples < 1) throw ParameterError("mountain_pass_probe: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), pos(0.0, 1.0);
  double theta = std::numeric_limits<double>::infinity();
  bool any_positive_d = false;
  for (int k = 0; k < samples; ++k) {
    Field u(prob.window());
    for (std::size_t i : prob.unknowns()) u[i] = sym(rng);
    const double n = problem_norm_sq(u, prob);
    if (n == 0.0) continue;
    u *= rho / std::sqrt(n);
    if (nonlocal_energy(u, prob.kernel(), prob.p()) > 0.0) any_positive_d = true;
    theta = std::min(theta, energy(u, prob));
  }
  if (!any_positive_d)
    throw InconclusiveProbe("mountain_pass_probe: no sample with D(u) > 0");

  Field w(prob.window());
  for (std::size_t i : prob.unknowns()) w[i] = pos(rng);
  const double a = problem_norm_sq(w, prob);
  const double b = nonlocal_energy(w, prob.kernel(), prob.p());
  if (!(b > 0.0)) throw InconclusiveProbe("mountain_pass_probe: witness has D(u) = 0");
  // J(t w) < 0 iff t^(2p-2) > p a / b
  const double t_neg = 1.5 * std::pow(prob.p() * a / b, 1.0 / (2.0 * prob.p() - 2.0));
  return {theta, rho, t_neg, std::move(w)};
}

double nehari_lower_bound(double c_hat, double p) {
  if (!(c_hat > 0.0)) throw ParameterError("nehari_lower_bound: C_hat must be > 0");
  return std::pow(c_hat, -1.0 / (2.0 * (p - 1.0)));
}

}  // namespace choquard
