#include "choquard/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "choquard/calculus.hpp"
#include "choquard/errors.hpp"
#include "choquard/kernels.hpp"

namespace choquard {

std::string to_string(Initializer init) {
  switch (init) {
    case Initializer::well_bump: return "well_bump";
    case Initializer::random_positive: return "random_positive";
    case Initializer::supplied: return "supplied";
  }
  return "unknown";
}

Initializer parse_initializer(const std::string& name) {
  if (name == "well_bump") return Initializer::well_bump;
  if (name == "random_positive") return Initializer::random_positive;
  if (name == "supplied") return Initializer::supplied;
  throw InputError("unknown initializer '" + name + "'");
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw ParameterError("solver: max_iterations must be >= 1");
  if (!(residual_tol > 0.0)) throw ParameterError("solver: residual_tol must be > 0");
  if (!(nehari_tol > 0.0)) throw ParameterError("solver: nehari_tol must be > 0");
  if (!(cg_tol > 0.0)) throw ParameterError("solver: cg_tol must be > 0");
  if (cg_max_iterations < 1) throw ParameterError("solver: cg_max_iterations must be >= 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ParameterError("solver: shrink must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ParameterError("solver: armijo must lie in (0, 1)");
  if (!(min_step > 0.0 && min_step < 1.0)) throw ParameterError("solver: min_step must lie in (0, 1)");
  if (restarts < 0) throw ParameterError("solver: restarts must be >= 0");
}

namespace {

double norm2(const Field& f) { return std::sqrt(dot(f, f)); }

// Everything one iterate needs, from one operator application and one
// convolution.
struct State {
  Field u;
  double norm_sq;
  double nonlocal;
  double energy;
  Field gradient;
};

State evaluate(const Field& u, const ProblemSpec& prob) {
  const double p = prob.p();
  const Field au = apply_quadratic_operator(u, prob);
  const Field f = abs_pow(u, p);
  const Field c = convolve(prob.kernel(), f, false);
  State s{u, dot(u, au), dot(c, f), 0.0, au};
  s.energy = 0.5 * s.norm_sq - s.nonlocal / (2.0 * p);
  for (std::size_t i : prob.unknowns()) {
    const double a = std::abs(u[i]);
    if (a == 0.0) continue;
    const double mag = p == 2.0 ? a : std::pow(a, p - 1.0);
    s.gradient[i] -= c[i] * std::copysign(mag, u[i]);
  }
  return s;
}

std::optional<Field> try_project(const Field& u, const ProblemSpec& prob) {
  try {
    return nehari_project(u, prob).u;
  } catch (const NoProjection&) {
    return std::nullopt;
  }
}

}  // namespace

Field cg_solve(const Field& rhs, const ProblemSpec& prob, const SolverConfig& cfg,
               int* iterations) {
  const Field b = prob.restrict(rhs);
  const Field diag = quadratic_operator_diagonal(prob);
  const auto& idx = prob.unknowns();
  Field x(prob.window());
  if (iterations) *iterations = 0;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return x;

  Field r = b;
  Field z(prob.window());
  for (std::size_t i : idx) z[i] = r[i] / diag[i];
  Field d = z;
  double rz = dot(r, z);
  double rel = 1.0;
  for (int k = 1; k <= cfg.cg_max_iterations; ++k) {
    const Field ad = apply_quadratic_operator(d, prob);
    const double step = rz / dot(d, ad);
    for (std::size_t i : idx) {
      x[i] += step * d[i];
      r[i] -= step * ad[i];
    }
    rel = norm2(r) / bnorm;
    if (iterations) *iterations = k;
    if (rel <= cfg.cg_tol) {
      // confirm with the true residual, restarting from it if recursion drifted
      r = b - apply_quadratic_operator(x, prob);
      rel = norm2(r) / bnorm;
      if (rel <= cfg.cg_tol) return x;
      for (std::size_t i : idx) z[i] = r[i] / diag[i];
      d = z;
      rz = dot(r, z);
      continue;
    }
    for (std::size_t i : idx) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i : idx) d[i] = z[i] + beta * d[i];
  }
  throw ConvergenceError("cg_solve: no convergence in " + std::to_string(cfg.cg_max_iterations) +
                             " iterations (relative residual " + format_double(rel) + ")",
                         rel);
}

double dual_norm(const Field& g, const ProblemSpec& prob, const SolverConfig& cfg) {
  const Field rg = prob.restrict(g);
  return std::sqrt(std::max(0.0, dot(rg, cg_solve(rg, prob, cfg))));
}

Field initial_field(Initializer kind, const ProblemSpec& prob, std::uint64_t seed) {
  const LatticeWindow& w = prob.window();
  switch (kind) {
    case Initializer::well_bump: {
      Field bump(w);
      for (std::size_t i = 0; i < w.size(); ++i)
        bump[i] = prob.potential_values()[i] == 0.0 ? 1.0 : 0.0;
      return prob.restrict(heat_semigroup(bump, 1.0));
    }
    case Initializer::random_positive: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Field u(w);
      const double level = prob.potential().bound;
      for (std::size_t i : prob.unknowns()) {
        const double r = unit(rng);
        if (prob.potential_values()[i] <= level) u[i] = r;
      }
      return u;
    }
    case Initializer::supplied: break;
  }
  throw InputError("initial_field: a supplied field must be passed explicitly");
}

SolveResult descend(const ProblemSpec& prob, const SolverConfig& cfg, const Field& u0) {
  cfg.validate();
  prob.check_admissible(u0);
  auto projected = try_project(prob.restrict(u0), prob);
  if (!projected) {
    throw InitializerError(
        "initial field has D(u) = 0 (e.g. a single-site field), so it cannot be projected "
        "onto the Nehari manifold");
  }

  SolveResult res{*projected, 0, 0, 0, 0, 0, 0, false, {}, {}, {}, 0};
  State s = evaluate(*projected, prob);
  double step = 1.0;
  for (int it = 0;; ++it) {
    const Field r = cg_solve(s.gradient, prob, cfg);
    const double dual = std::sqrt(std::max(0.0, dot(s.gradient, r)));
    const double coord = norm2(s.gradient);
    const double unorm = std::sqrt(s.norm_sq);
    const double defect = std::abs(s.norm_sq - s.nonlocal) / s.norm_sq;
    res.history.push_back({it, s.energy, dual, coord, s.norm_sq - s.nonlocal, s.norm_sq,
                           it == 0 ? 0.0 : step});

    res.u = s.u;
    res.level = s.energy;
    res.norm_sq = s.norm_sq;
    res.dual_residual = dual / unorm;
    res.coord_residual = coord / unorm;
    res.nehari_defect = defect;
    res.iterations = it;
    if (dual <= cfg.residual_tol * unorm && coord <= cfg.residual_tol * unorm &&
        defect <= cfg.nehari_tol) {
      res.converged = true;
      return res;
    }
    if (it == cfg.max_iterations) {
      throw SolveFailed("descent: no convergence in " + std::to_string(cfg.max_iterations) +
                            " iterations (dual residual " + format_double(dual / unorm) + ")",
                        dual / unorm, std::move(res.history));
    }

    // backtracking on the Nehari-projected path u -> P(u - step r)
    const double slope = dual * dual;
    step = std::min(1.0, 2.0 * step);
    while (true) {
      auto c = try_project(s.u - r * step, prob);
      if (c) {
        const double dj = energy_difference(*c, s.u, prob);
        if (dj <= -cfg.armijo * step * slope) {
          s = evaluate(*c, prob);
          break;
        }
      }
      step *= cfg.shrink;
      if (step < cfg.min_step) {
        throw SolveFailed("descent: energy stagnates at the minimal step (dual residual " +
                              format_double(dual / unorm) + ")",
                          dual / unorm, std::move(res.history));
      }
    }
  }
}

SolveResult ground_state(const ProblemSpec& prob, const SolverConfig& cfg,
                         const std::optional<Field>& supplied,
                         const std::vector<Field>& warm_starts) {
  cfg.validate();
  std::vector<std::pair<std::string, Field>> starts;
  if (cfg.initializer == Initializer::supplied) {
    if (!supplied) throw InitializerError("ground_state: supplied initializer without a field");
    starts.emplace_back("supplied", prob.restrict(*supplied));
  } else {
    starts.emplace_back(to_string(cfg.initializer), initial_field(cfg.initializer, prob, cfg.seed));
  }
  for (std::size_t k = 0; k < warm_starts.size(); ++k)
    starts.emplace_back("warm_" + std::to_string(k), prob.restrict(warm_starts[k]));
  std::seed_seq seq{cfg.seed, std::uint64_t{0x9e3779b97f4a7c15ull}};
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.restarts));
  {
    std::vector<std::uint32_t> raw(seeds.size() * 2);
    seq.generate(raw.begin(), raw.end());
    for (std::size_t k = 0; k < seeds.size(); ++k)
      seeds[k] = (std::uint64_t{raw[2 * k]} << 32) | raw[2 * k + 1];
  }
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    starts.emplace_back("random_" + std::to_string(k),
                        initial_field(Initializer::random_positive, prob, seeds[k]));
  }

  std::optional<SolveResult> best;
  std::vector<double> levels;
  std::vector<std::string> labels;
  std::string last_failure;
  std::optional<SolveFailed> last_error;
  int initializer_failures = 0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    labels.push_back(starts[k].first);
    try {
      SolveResult r = descend(prob, cfg, starts[k].second);
      levels.push_back(r.level);
      if (!best || r.level < best->level) {
        best = std::move(r);
        best->best_start = static_cast<int>(k);
      }
    } catch (const InitializerError& e) {
      ++initializer_failures;
      levels.push_back(std::numeric_limits<double>::quiet_NaN());
      last_failure = starts[k].first + ": " + e.what();
    } catch (const SolveFailed& e) {
      levels.push_back(std::numeric_limits<double>::quiet_NaN());
      last_failure = starts[k].first + ": " + e.what();
      last_error = e;
    }
  }
  if (!best) {
    if (initializer_failures == static_cast<int>(starts.size()))
      throw InitializerError("ground_state: no start has D(u) > 0 (" + last_failure + ")");
    throw SolveFailed("ground_state: every start failed; last: " + last_failure,
                      last_error->residual(), last_error->history());
  }
  best->start_levels = std::move(levels);
  best->start_labels = std::move(labels);
  return *best;
}

ConvergenceReport lambda_sweep(const ProblemSpec& full_template, const std::vector<double>& grid,
                               const SolverConfig& cfg, double tol) {
  if (grid.empty()) throw InputError("lambda_sweep: empty grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) throw InputError("lambda_sweep: lambda values must be > 0");
    if (k > 0 && !(grid[k] > grid[k - 1]))
      throw InputError("lambda_sweep: grid must be strictly increasing");
  }
  const ProblemSpec dir = full_template.with_mode(Mode::dirichlet);
  const SolveResult omega = ground_state(dir, cfg);
  const double omega_w22 = std::sqrt(w22_norm_sq(omega.u));

  ConvergenceReport rep{};
  rep.omega_level = omega.level;
  rep.omega_w22_norm = omega_w22;
  rep.omega_iterations = omega.iterations;
  rep.omega_residual = omega.dual_residual;

  std::optional<Field> previous;
  for (double lambda : grid) {
    const ProblemSpec prob = full_template.with_mode(Mode::full).with_lambda(lambda);
    SweepRow row;
    row.lambda = lambda;
    row.converged = false;
    try {
      std::vector<Field> warm{omega.u};
      if (previous) warm.push_back(*previous);
      const SolveResult r = ground_state(prob, cfg, std::nullopt, warm);
      row.converged = true;
      row.level = r.level;
      row.iterations = r.iterations;
      row.residual = r.dual_residual;
      row.start_levels = r.start_levels;
      row.w22_dist = std::min(std::sqrt(w22_norm_sq(r.u - omega.u)),
                              std::sqrt(w22_norm_sq(r.u + omega.u)));
      row.w22_rel = row.w22_dist / omega_w22;
      const auto& a = prob.potential_values();
      for (std::size_t i = 0; i < r.u.size(); ++i) {
        if (a[i] == 0.0) continue;
        const double u2 = r.u[i] * r.u[i];
        row.outside_mass += lambda * a[i] * u2;
        row.outside_mass_weighted += (1.0 + lambda * a[i]) * u2;
      }
      previous = r.u;
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    rep.rows.push_back(std::move(row));
  }

  rep.all_converged = std::all_of(rep.rows.begin(), rep.rows.end(),
                                  [](const SweepRow& r) { return r.converged; });
  const double slack = tol * std::abs(rep.omega_level);
  rep.levels_nondecreasing = rep.levels_below_omega = true;
  rep.distance_decreasing = rep.outside_mass_decreasing = true;
  const SweepRow* prev = nullptr;
  for (const auto& row : rep.rows) {
    if (!row.converged) {
      rep.levels_nondecreasing = rep.levels_below_omega = false;
      rep.distance_decreasing = rep.outside_mass_decreasing = false;
      prev = nullptr;
      continue;
    }
    if (row.level > rep.omega_level + slack) rep.levels_below_omega = false;
    if (prev) {
      if (row.level < prev->level - slack) rep.levels_nondecreasing = false;
      if (!(row.w22_dist < prev->w22_dist)) rep.distance_decreasing = false;
      if (!(row.outside_mass < prev->outside_mass)) rep.outside_mass_decreasing = false;
    }
    prev = &row;
  }
  const auto& last = rep.rows.back();
  rep.final_level_gap = last.converged
                            ? std::abs(last.level - rep.omega_level) / rep.omega_level
                            : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

PsDiagnostics ps_monitor(const std::vector<IterationRecord>& history, double p) {
  if (history.empty()) throw InputError("ps_monitor: empty history");
  const double kappa = 0.5 - 0.5 / p;
  double worst = 0.0;
  for (const auto& h : history) {
    const double gap = h.energy - h.nehari_F / (2.0 * p) - kappa * h.norm_sq;
    worst = std::max(worst, std::abs(gap) / h.norm_sq);
  }
  const auto& last = history.back();
  const double limit = 2.0 * p * last.energy / (p - 1.0);
  return {worst, std::abs(last.norm_sq - limit) / last.norm_sq, last.energy};
}

std::vector<BrezisLiebRow> brezis_lieb_probe(const Field& u, const Field& v,
                                             const std::vector<Site>& shifts,
                                             const ProblemSpec& prob) {
  if (!(u.window() == prob.window()) || !(v.window() == prob.window()))
    throw InputError("brezis_lieb_probe: field window mismatch");
  const KernelTable& k = prob.kernel();
  const double p = prob.p();
  const double du = nonlocal_energy(u, k, p);
  std::vector<BrezisLiebRow> rows;
  for (const auto& z : shifts) {
    if (static_cast<int>(z.size()) != prob.dim())
      throw InputError("brezis_lieb_probe: shift dimension mismatch");
    Field vz(prob.window());
    try {
      vz = v.translated(z);
    } catch (const InputError&) {
      throw InputError("brezis_lieb_probe: the shifted bump leaves the window");
    }
    const Field un = u + vz;
    const double nonlocal = nonlocal_energy(un, k, p) - nonlocal_energy(vz, k, p) - du;
    // |u + vz|^2 - |vz|^2 - |u|^2 is exactly twice the cross term
    const double norm = 2.0 * w22_inner(u, vz);
    rows.push_back({z, word_distance(z, Site(z.size(), 0)), std::abs(nonlocal), norm});
  }
  return rows;
}

}  // namespace choquard
