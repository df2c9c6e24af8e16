#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "choquard/calculus.hpp"
#include "choquard/errors.hpp"
#include "choquard/solver.hpp"
#include "choquard/variational.hpp"

namespace choquard::cli {

using nlohmann::ordered_json;

namespace {

std::string sci(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << x;
  return os.str();
}

class Recorder {
 public:
  explicit Recorder(SuiteResult& r) : r_(r) {}

  void measure(const std::string& key, double value) { r_.measured.emplace_back(key, value); }

  void expect(bool ok, const std::string& message) {
    if (ok) return;
    r_.passed = false;
    r_.failures.push_back(message);
  }

  /// value <= limit, recorded under `key`.
  void at_most(const std::string& key, double value, double limit) {
    measure(key, value);
    expect(value <= limit, key + " = " + sci(value) + " exceeds " + sci(limit));
  }

 private:
  SuiteResult& r_;
};

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

int l1(std::span<const int> v) {
  int s = 0;
  for (int c : v) s += std::abs(c);
  return s;
}

Site axis_offset(int dim, std::initializer_list<int> head) {
  Site v(static_cast<std::size_t>(dim), 0);
  std::size_t a = 0;
  for (int c : head) {
    if (a == v.size()) break;
    v[a++] = c;
  }
  return v;
}

// Random values in [lo, hi) on the sites with |x|_inf <= reach, each kept
// with probability `density`.
Field random_box_field(const LatticeWindow& w, int reach, std::mt19937_64& rng, double lo,
                       double hi, double density = 1.0) {
  std::uniform_real_distribution<double> value(lo, hi), coin(0.0, 1.0);
  Field f(w);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Site x = w.site(i);
    const bool inside =
        std::all_of(x.begin(), x.end(), [reach](int c) { return std::abs(c) <= reach; });
    const double v = value(rng);
    const double keep = coin(rng);
    if (inside && keep < density) f[i] = v;
  }
  return f;
}

// Nonnegative field on a word ball of random radius 0..max_radius whose
// centre has |c|_inf <= spread.
Field random_ball_field(const LatticeWindow& w, int max_radius, int spread, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> radius(0, max_radius), coord(-spread, spread);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  Site c(static_cast<std::size_t>(w.dim()));
  for (int& x : c) x = coord(rng);
  Field f(w);
  for (const auto& x : ball(c, radius(rng))) f.set(x, value(rng));
  return f;
}

double hls_exponent(int dim, double alpha) { return 2.0 * dim / (dim + alpha); }

// Largest sampled HLS ratio over `samples` independent pairs.
double sample_hls_constant(const KernelTable& k, const LatticeWindow& w, int samples,
                           std::mt19937_64& rng, bool* all_finite = nullptr) {
  const double r = hls_exponent(k.dim(), k.alpha());
  const int max_radius = std::max(0, std::min(6, w.radius() / 2 - 2));
  const int spread = std::max(0, w.radius() / 4);
  double best = 0.0;
  bool finite = true;
  for (int n = 0; n < samples; ++n) {
    Field u = random_ball_field(w, max_radius, spread, rng);
    Field v = random_ball_field(w, max_radius, spread, rng);
    const double q = hls_ratio(u, v, k, r, r);
    finite = finite && std::isfinite(q);
    best = std::max(best, q);
  }
  if (all_finite) *all_finite = finite;
  return best;
}

}  // namespace

ordered_json suite_json(const SuiteResult& r) {
  ordered_json measured = ordered_json::object();
  for (const auto& [k, v] : r.measured) measured[k] = v;
  return {{"name", r.name}, {"passed", r.passed}, {"measured", measured}, {"failures", r.failures}};
}

SuiteRunner::SuiteRunner(RunConfig cfg) : cfg_(std::move(cfg)) {}

std::shared_ptr<const KernelTable> SuiteRunner::problem_kernel() {
  if (!kernel_) {
    const auto& pr = cfg_.problem;
    kernel_ = std::make_shared<KernelTable>(
        load_or_build_kernel_table(pr.kernel, pr.alpha, problem_window(cfg_), cfg_.quadrature,
                                   cfg_.output.cache_dir)
            .table);
  }
  return kernel_;
}

SuiteResult SuiteRunner::run(const std::string& name) {
  const auto& pr = cfg_.problem;
  const auto& vc = cfg_.verify;
  const int dim = pr.dim;
  const LatticeWindow win = problem_window(cfg_);
  const std::size_t index = static_cast<std::size_t>(
      std::find(all_suites().begin(), all_suites().end(), name) - all_suites().begin());
  std::seed_seq seq{static_cast<std::uint64_t>(vc.seed), static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);

  SuiteResult result;
  result.name = name;
  Recorder rec(result);

  const auto full_problem = [&] {
    return make_problem(cfg_, problem_kernel(), Mode::full, pr.lambda);
  };

  const std::map<std::string, std::function<void()>> suites{
      {"operators",
       [&] {
         double ibp = 0.0, dist = 0.0;
         const int reach = std::max(1, win.radius() / 2);
         for (int n = 0; n < vc.samples; ++n) {
           const Field u = random_box_field(win, reach, rng, -1.0, 1.0, 0.5);
           const Field phi = random_box_field(win, reach, rng, -1.0, 1.0, 0.5);
           // sum Gamma(u, u) = -sum u Delta u
           const LatticeWindow w1 = win.enlarged(1);
           double gsum = 0.0;
           for (double g : gradient_form(u, u).values()) gsum += g;
           const double udu = -dot(u.on_window(w1), laplacian(u));
           ibp = std::max(ibp, std::abs(gsum - udu) / gsum);
           // sum Delta^2 u phi = sum Delta u Delta phi
           const Field lu = laplacian(u), lp = laplacian(phi);
           double scale = 0.0;
           for (std::size_t i = 0; i < lu.size(); ++i) scale += std::abs(lu[i] * lp[i]);
           const double lhs = dot(biharmonic(u), phi.on_window(win.enlarged(2)));
           dist = std::max(dist, std::abs(lhs - dot(lu, lp)) / scale);
         }
         rec.at_most("integration_by_parts_error", ibp, 1e-12);
         rec.at_most("biharmonic_identity_error", dist, 1e-12);

         const Site e(static_cast<std::size_t>(dim), 0);
         const Field d = Field::delta(win, e);
         rec.measure("biharmonic_delta_centre", biharmonic(d).at(e));
         rec.expect(biharmonic(d).at(e) == 4.0 * dim * dim + 2.0 * dim,
                    "Delta^2 delta at the origin differs from the stencil value");
         rec.measure("w22_norm_sq_delta", w22_norm_sq(d));
         rec.expect(w22_norm_sq(d) == 4.0 * dim * dim + 4.0 * dim + 1.0,
                    "|delta|^2 in W^{2,2} differs from the stencil value");
         const SiteSet origin(dim, {e});
         rec.expect(omega_norm_sq(d, origin) == w22_norm_sq(d),
                    "omega norm of delta over {e} differs from its W^{2,2} norm");
       }},

      {"heat",
       [&] {
         double mass_err = 0.0;
         const SiteSet region = ball(Site(static_cast<std::size_t>(dim), 0), 60);
         for (double t : {0.1, 1.0, 10.0}) {
           double s = 0.0;
           for (const auto& v : region) s += heat_kernel(t, v);
           const double excess = std::abs(s - 1.0) - heat_kernel_tail_bound(t, 60, dim);
           mass_err = std::max(mass_err, std::max(0.0, excess));
         }
         rec.at_most("mass_conservation_error", mass_err, 1e-10);

         // e^{-2} I_0(2) from the power series sum 1 / (k!)^2
         double series = 0.0, term = 1.0;
         for (int k = 0; k < 40; ++k) {
           series += term;
           term /= static_cast<double>((k + 1) * (k + 1));
         }
         series *= std::exp(-2.0);
         rec.at_most("bessel_series_error", std::abs(heat_kernel_1d(1.0, 0) - series) / series,
                     1e-13);

         // Bessel product against the torus sum, relative to the kernel's peak
         double agree = 0.0;
         for (int n : {1, 2}) {
           const auto reps = symmetry_orbits(n, 20);
           const int torus = 4 * 41 + 4;
           for (double t : {0.01, 0.1, 1.0, 10.0, 50.0}) {
             const double peak = heat_kernel(t, Site(static_cast<std::size_t>(n), 0));
             for (const auto& v : reps) {
               if (l1(v) > 20) continue;
               const double gap = std::abs(heat_kernel(t, v) - heat_kernel_spectral(t, v, torus));
               agree = std::max(agree, gap / peak);
             }
           }
         }
         rec.at_most("bessel_vs_spectral_error", agree, 1e-6);

         // k_s * k_t = k_{s+t} in one dimension
         double semi = 0.0;
         for (int v : {0, 1, 5}) {
           double s = 0.0;
           for (int w = -80; w <= 80; ++w) s += heat_kernel_1d(0.5, w) * heat_kernel_1d(0.7, v - w);
           semi = std::max(semi, std::abs(s - heat_kernel_1d(1.2, v)));
         }
         rec.at_most("semigroup_error", semi, 1e-8);
       }},

      {"green",
       [&] {
         const auto& q = cfg_.quadrature;
         double two_res = 0.0;
         for (auto head : {std::initializer_list<int>{0}, {1}, {1, 1}, {3, 2}, {5}, {10, 7},
                           {15, 15}, {30}}) {
           const Site v = axis_offset(dim, head);
           two_res = std::max(two_res, rel_gap(green_function(pr.alpha, v, q),
                                               green_function(pr.alpha, v, q.refined())));
         }
         rec.at_most("two_resolution_gap", two_res, 1e-8);

         const KernelTable g =
             pr.kernel == KernelKind::green
                 ? *problem_kernel()
                 : load_or_build_kernel_table(KernelKind::green, pr.alpha, win, q,
                                              cfg_.output.cache_dir)
                       .table;
         const KernelTable riesz = build_kernel_table(KernelKind::riesz, pr.alpha, win);
         double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
         double r1 = std::numeric_limits<double>::infinity(), r2 = 0.0;
         bool positive = g.diagonal() > 0.0 && std::isfinite(g.diagonal());
         const auto& reps = g.orbit_representatives();
         for (std::size_t k = 0; k < reps.size(); ++k) {
           const double value = g.orbit_values()[k];
           positive = positive && value > 0.0 && std::isfinite(value);
           const int d = l1(reps[k]);
           if (d < 5 || d > 30) continue;
           const double scaled = value * std::pow(d, dim - pr.alpha);
           c1 = std::min(c1, scaled);
           c2 = std::max(c2, scaled);
           const double ratio = value / riesz(reps[k]);
           r1 = std::min(r1, ratio);
           r2 = std::max(r2, ratio);
         }
         rec.expect(positive, "table holds a nonpositive or non-finite value");
         rec.measure("c1", c1);
         rec.measure("c2", c2);
         rec.at_most("bracket_ratio", c2 / c1, 10.0);
         rec.measure("green_riesz_ratio_min", r1);
         rec.measure("green_riesz_ratio_max", r2);
         rec.at_most("green_riesz_ratio_spread", r2 / r1, 10.0);

         double asym = 0.0;
         for (int n = 0; n < vc.samples; ++n) {
           std::uniform_int_distribution<int> coord(-g.range(), g.range());
           Site v(static_cast<std::size_t>(dim));
           for (int& c : v) c = coord(rng);
           Site w = v;
           for (int& c : w) c = -c;
           std::reverse(w.begin(), w.end());
           asym = std::max(asym, std::abs(g(v) - g(w)));
         }
         rec.at_most("symmetry_defect", asym, 0.0);
       }},

      {"green_identity",
       [&] {
         const LatticeWindow big(dim, vc.green_radius);
         const auto cached = load_or_build_kernel_table(KernelKind::green, pr.alpha, big,
                                                        cfg_.quadrature, cfg_.output.cache_dir);
         const Site e(static_cast<std::size_t>(dim), 0);
         const Field f = Field::delta(big, e);
         const Field v = convolve(cached.table, f, true);
         const Field back = fractional_laplacian(pr.alpha, v, cfg_.quadrature);
         const int interior = vc.green_radius / 4;
         double err = 0.0;
         for (std::size_t i = 0; i < back.size(); ++i) {
           const Site x = big.site(i);
           if (std::any_of(x.begin(), x.end(), [&](int c) { return std::abs(c) > interior; }))
             continue;
           err = std::max(err, std::abs(back[i] - f[i]));
         }
         rec.at_most("interior_sup_error", err, 1e-4);
       }},

      {"hls",
       [&] {
         const auto k = problem_kernel();
         bool finite1 = false, finite2 = false;
         const double c_hat = sample_hls_constant(*k, win, vc.hls_samples, rng, &finite1);
         const double c_again = sample_hls_constant(*k, win, vc.hls_samples, rng, &finite2);
         rec.expect(finite1 && finite2, "a sampled ratio is not finite");
         rec.measure("C_hat", c_hat);
         rec.measure("C_hat_resample", c_again);
         rec.at_most("resample_change", std::abs(c_again - c_hat) / c_hat, 0.2);

         const double r = hls_exponent(dim, pr.alpha);
         double scale = 0.0, shift = 0.0;
         const int spread = std::max(0, win.radius() / 4);
         const int max_radius = std::max(0, std::min(6, win.radius() / 2 - 2));
         std::uniform_int_distribution<int> coord(-spread, spread);
         for (int n = 0; n < vc.samples; ++n) {
           const Field u = random_ball_field(win, max_radius, spread, rng);
           const Field v = random_ball_field(win, max_radius, spread, rng);
           const double base = hls_ratio(u, v, *k, r, r);
           scale = std::max(scale, rel_gap(base, hls_ratio(3.7 * u, 0.013 * v, *k, r, r)));
           Site z(static_cast<std::size_t>(dim));
           for (int& c : z) c = coord(rng);
           shift = std::max(shift,
                            rel_gap(base, hls_ratio(u.translated(z), v.translated(z), *k, r, r)));
         }
         rec.at_most("scale_invariance_error", scale, 1e-12);
         rec.at_most("translation_invariance_error", shift, 1e-12);
       }},

      {"brezis_lieb",
       [&] {
         const ProblemSpec prob = full_problem();
         const Site e(static_cast<std::size_t>(dim), 0);
         std::uniform_real_distribution<double> value(0.5, 1.0);
         Field u(win), v(win);
         for (const auto& x : ball(e, 2)) {
           u.set(x, value(rng));
           v.set(x, value(rng));
         }
         const std::vector<Site> shifts{axis_offset(dim, {4, 4}), axis_offset(dim, {8, 8}),
                                        axis_offset(dim, {12, 12})};
         const auto rows = brezis_lieb_probe(u, v, shifts, prob);
         const auto zero = brezis_lieb_probe(u, Field(win), shifts, prob);
         double zero_defect = 0.0, norm_defect = 0.0;
         for (const auto& row : zero) zero_defect = std::max(zero_defect, row.nonlocal_defect);
         for (const auto& row : rows) norm_defect = std::max(norm_defect, std::abs(row.norm_defect));
         rec.at_most("zero_bump_defect", zero_defect, 0.0);
         rec.at_most("norm_defect", norm_defect, 0.0);
         bool decreasing = true;
         for (std::size_t k = 0; k < rows.size(); ++k) {
           rec.measure("nonlocal_defect_d" + std::to_string(rows[k].distance), rows[k].nonlocal_defect);
           if (k > 0 && !(rows[k].nonlocal_defect < rows[k - 1].nonlocal_defect)) decreasing = false;
         }
         rec.expect(decreasing, "nonlocal defect does not decrease with the shift");
         const double nu = std::sqrt(w22_norm_sq(u)), nv = std::sqrt(w22_norm_sq(v));
         const double bound = 10.0 * std::pow(rows.back().distance, pr.alpha - dim) *
                              std::pow(nu + nv, 2.0 * pr.p);
         rec.measure("final_bound", bound);
         rec.expect(rows.back().nonlocal_defect <= bound,
                    "final nonlocal defect exceeds 10 d^(alpha - N) (|u| + |v|)^(2p)");
       }},

      {"lions",
       [&] {
         const Site e(static_cast<std::size_t>(dim), 0);
         const Field d = Field::delta(win, e);
         rec.expect(interpolation_check(d, 2.0, 4.0), "delta fails the s = 2, t = 4 check");
         Field spikes = d;
         spikes.set(axis_offset(dim, {3}), 1.0);
         rec.expect(interpolation_check(spikes, 1.0, 2.0), "two spikes fail the s = 1, t = 2 check");
         int failed = 0;
         for (int n = 0; n < vc.samples; ++n) {
           const Field u = random_box_field(win, win.radius() / 2, rng, -1.0, 1.0, 0.7);
           for (auto [s, t] : {std::pair{2.0, 6.0}, {1.0, 2.0}, {2.0, 4.0}, {1.5, 3.5}})
             if (!interpolation_check(u, s, t)) ++failed;
         }
         rec.at_most("random_failures", failed, 0.0);
       }},

      {"nehari",
       [&] {
         const ProblemSpec prob = full_problem();
         const double p = prob.p();
         const double kappa = 0.5 - 0.5 / p;
         const double c_hat = sample_hls_constant(prob.kernel(), win, vc.hls_samples, rng);
         const double sigma = nehari_lower_bound(c_hat, p);
         rec.measure("C_hat", c_hat);
         rec.measure("sigma_hat", sigma);

         double f_err = 0.0, level_err = 0.0, reproject = 0.0, min_norm = 1e300, min_level = 1e300;
         double fd_err = 0.0, pairing = 0.0;
         bool single_root = true;
         std::normal_distribution<double> gauss(0.0, 1.0);
         const int reach = std::max(1, win.radius() / 2);
         for (int n = 0; n < vc.samples; ++n) {
           const Field u = random_box_field(win, reach, rng, -1.0, 1.0, 0.5);
           const auto proj = nehari_project(u, prob);
           const double nsq = problem_norm_sq(proj.u, prob);
           f_err = std::max(f_err, std::abs(nehari_F(proj.u, prob)) / nsq);
           const double level = nehari_level(proj.u, prob);
           level_err = std::max(level_err, std::abs(level - kappa * nsq) / level);
           reproject = std::max(reproject, std::abs(nehari_project(proj.u, prob).t - 1.0));
           min_norm = std::min(min_norm, std::sqrt(nsq));
           min_level = std::min(min_level, level);
           for (double f : {0.5, 0.9}) single_root = single_root && nehari_F(f * proj.u, prob) > 0.0;
           for (double f : {1.1, 2.0}) single_root = single_root && nehari_F(f * proj.u, prob) < 0.0;

           const Field g = euler_lagrange_residual(u, prob);
           pairing = std::max(pairing, std::abs(nehari_F(u, prob) - dot(g, u)) /
                                           problem_norm_sq(u, prob));
           Field dir(win);
           for (std::size_t i : prob.unknowns()) dir[i] = gauss(rng);
           dir *= 1.0 / std::sqrt(problem_norm_sq(dir, prob));
           const double h = 1e-5;
           const double fd = energy_difference(u + h * dir, u - h * dir, prob) / (2.0 * h);
           fd_err = std::max(fd_err, rel_gap(fd, dot(g, dir)));
         }
         rec.at_most("projection_defect", f_err, 1e-12);
         rec.at_most("level_identity_error", level_err, 1e-10);
         rec.at_most("reprojection_defect", reproject, 1e-12);
         rec.at_most("pairing_error", pairing, 1e-12);
         rec.at_most("directional_derivative_error", fd_err, 1e-6);
         rec.expect(single_root, "F(t u) changes sign other than once at t0");
         rec.measure("min_projected_norm", min_norm);
         rec.expect(min_norm >= sigma, "a projected norm lies below sigma_hat");
         rec.measure("min_projected_level", min_level);
         rec.expect(min_level >= kappa * sigma * sigma, "a projected level lies below the bound");

         bool raised = false;
         try {
           nehari_project(Field::delta(win, Site(static_cast<std::size_t>(dim), 0)), prob);
         } catch (const NoProjection&) {
           raised = true;
         }
         rec.expect(raised, "a single-site field was projected");
       }},

      {"mountain_pass",
       [&] {
         const ProblemSpec prob = full_problem();
         const double rho = 1e-3;
         const auto probe = mountain_pass_probe(prob, rho, vc.samples, rng());
         rec.measure("theta_hat", probe.theta_hat);
         rec.expect(probe.theta_hat > 0.0, "theta_hat is not positive");
         rec.expect(probe.theta_hat >= rho * rho / 4.0, "theta_hat lies below rho^2 / 4");
         rec.measure("t_neg", probe.t_neg);
         const double j1 = energy(probe.t_neg * probe.witness, prob);
         const double j2 = energy(2.0 * probe.t_neg * probe.witness, prob);
         rec.expect(j1 < 0.0 && j2 < 0.0, "J(t_neg w) or J(2 t_neg w) is not negative");
         const double small = 1e-4;
         const auto fine = mountain_pass_probe(prob, small, vc.samples, rng());
         const double ratio = fine.theta_hat / (small * small);
         rec.measure("theta_over_rho_sq", ratio);
         // J <= rho^2 / 2 exactly, up to the rounding of the rescaled norm
         rec.expect(ratio >= 0.4 && ratio <= 0.5 + 1e-12,
                    "theta_hat / rho^2 at rho = 1e-4 outside [0.4, 0.5]");
       }},

      {"embedding",
       [&] {
         const ProblemSpec prob = full_problem();
         int violations = 0;
         double worst = 0.0;
         for (int n = 0; n < vc.samples; ++n) {
           const Field u = random_box_field(win, win.radius() - 2, rng, -1.0, 1.0, 0.5);
           const double e = std::sqrt(elambda_norm_sq(u, prob.potential(), prob.lambda()));
           for (double q : {2.0, 4.0, 8.0}) {
             const double ratio = lp_norm(u, q) / e;
             worst = std::max(worst, ratio);
             if (ratio > 1.0) ++violations;
           }
         }
         rec.measure("max_lq_over_elambda", worst);
         rec.at_most("embedding_violations", violations, 0.0);

         const auto gb = growth_bracket(dim, 50);
         rec.measure("growth_c1", gb.c1);
         rec.measure("growth_c2", gb.c2);
         if (dim == 2) {
           // |B_r| = 2r^2 + 2r + 1 on Z^2, so beta(r) / r^2 falls from 5 at r = 1
           // and stays in [2, 3] from r = 3 on
           bool exact = true, tail = true;
           for (int r = 1; r <= 50; ++r) {
             const double b = static_cast<double>(growth_function(r, 2));
             exact = exact && b == 2.0 * r * r + 2.0 * r + 1.0;
             if (r >= 3) tail = tail && b >= 2.0 * r * r && b <= 3.0 * r * r;
           }
           rec.expect(exact, "beta(r) differs from 2r^2 + 2r + 1");
           rec.expect(tail, "beta(r) / r^2 leaves [2, 3] for r >= 3");
           rec.expect(gb.c1 >= 1.0 && gb.c2 <= 5.0, "beta(r) / r^2 leaves [1, 5]");
         }
         bool boundary = true;
         for (int r = 0; r <= 4; ++r) {
           const Site e(static_cast<std::size_t>(dim), 0);
           boundary = boundary && vertex_boundary(ball(e, r)) == sphere(e, r + 1);
         }
         rec.expect(boundary, "vertex boundary of a ball differs from the next sphere");
       }},
  };

  const auto it = suites.find(name);
  if (it == suites.end()) throw InputError("unknown suite '" + name + "'");
  try {
    it->second();
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    rec.expect(false, std::string("error: ") + e.what());
  }
  return result;
}

}  // namespace choquard::cli
