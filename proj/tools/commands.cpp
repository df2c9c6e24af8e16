#include "commands.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "choquard/errors.hpp"
#include "choquard/solver.hpp"
#include "report.hpp"
#include "verify.hpp"

namespace choquard::cli {

using nlohmann::ordered_json;

namespace {

int l1(std::span<const int> v) {
  int s = 0;
  for (int c : v) s += std::abs(c);
  return s;
}

CachedKernel problem_kernel(const RunConfig& cfg) {
  const auto& pr = cfg.problem;
  return load_or_build_kernel_table(pr.kernel, pr.alpha, problem_window(cfg), cfg.quadrature,
                                    cfg.output.cache_dir);
}

ordered_json problem_json(const ProblemSpec& prob) {
  return {{"mode", to_string(prob.mode())},
          {"lambda", prob.lambda()},
          {"unknowns", prob.unknown_count()}};
}

}  // namespace

KernelBracket asymptotic_bracket(const KernelTable& table, int lo, int hi) {
  KernelBracket b{std::numeric_limits<double>::infinity(), 0.0};
  const auto& reps = table.orbit_representatives();
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const int d = l1(reps[k]);
    if (d < lo || d > hi) continue;
    const double scaled = table.orbit_values()[k] * std::pow(d, table.dim() - table.alpha());
    b.c1 = std::min(b.c1, scaled);
    b.c2 = std::max(b.c2, scaled);
  }
  return b;
}

int cmd_kernel(const RunConfig& cfg, std::ostream& out) {
  const auto cached = problem_kernel(cfg);
  const KernelTable& k = cached.table;
  const auto j = kernel_json(k, cached.path);
  out << "kernel " << to_string(k.kind()) << " alpha=" << format_double(k.alpha())
      << " N=" << k.dim() << " R=" << k.window_radius() << " method=" << to_string(k.method())
      << '\n';
  out << "cache " << (cached.cache_hit ? "hit" : "miss") << ": " << cached.path.string() << '\n';
  out << "content hash " << j["content_hash"].get<std::string>() << ", " << k.orbit_count()
      << " orbits\n";

  const int hi = std::min(30, k.range());
  const KernelBracket b = asymptotic_bracket(k, 5, hi);
  out << "bracket over 5 <= |v|_1 <= " << hi << ": c1=" << format_double(b.c1)
      << " c2=" << format_double(b.c2) << " c2/c1=" << format_double(b.c2 / b.c1) << '\n';

  if (k.kind() == KernelKind::green) {
    double gap = 0.0;
    for (std::size_t i = 0; i < k.orbit_count(); i += std::max<std::size_t>(1, k.orbit_count() / 12)) {
      const Site& v = k.orbit_representatives()[i];
      const double a = green_function(k.alpha(), v, k.quadrature());
      const double r = green_function(k.alpha(), v, k.quadrature().refined());
      gap = std::max(gap, std::abs(a - r) / std::abs(r));
    }
    const KernelTable riesz = build_kernel_table(KernelKind::riesz, k.alpha(),
                                                 LatticeWindow(k.dim(), k.window_radius()));
    double lo = std::numeric_limits<double>::infinity(), up = 0.0;
    for (std::size_t i = 0; i < k.orbit_count(); ++i) {
      const int d = l1(k.orbit_representatives()[i]);
      if (d < 5 || d > hi) continue;
      const double ratio = k.orbit_values()[i] / riesz.orbit_values()[i];
      lo = std::min(lo, ratio);
      up = std::max(up, ratio);
    }
    out << "quadrature n vs 2n: max relative gap " << format_double(gap) << '\n';
    out << "green / riesz over 5 <= |v|_1 <= " << hi << ": [" << format_double(lo) << ", "
        << format_double(up) << "]\n";
  }
  return exit_ok;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const auto cached = problem_kernel(cfg);
  auto kernel = std::make_shared<const KernelTable>(cached.table);
  const ProblemSpec prob = make_problem(cfg, kernel, cfg.problem.mode, cfg.problem.lambda);
  std::optional<Field> supplied;
  if (cfg.solver.initializer == Initializer::supplied) supplied = load_field(cfg.initial_field);

  ordered_json report;
  report["command"] = "solve";
  report["config"] = config_to_json(cfg);
  report["kernel"] = kernel_json(*kernel, cached.path);
  report["problem"] = problem_json(prob);
  const auto report_path = cfg.output.dir / "report.json";

  try {
    const SolveResult r = ground_state(prob, cfg.solver, supplied);
    ordered_json result = solve_result_json(r);
    const PsDiagnostics ps = ps_monitor(r.history, prob.p());
    result["ps_identity_error"] = ps.identity_error;
    result["ps_limit_error"] = ps.limit_error;
    report["result"] = std::move(result);
    write_text_file(report_path, dump_json(report));
    write_text_file(cfg.output.dir / "solution.field", format_field(r.u));
    out << (prob.mode() == Mode::full ? "m_lambda = " : "m_omega = ") << format_double(r.level)
        << " after " << r.iterations << " iterations (dual residual "
        << format_double(r.dual_residual) << ", best start " << r.start_labels.at(static_cast<std::size_t>(r.best_start))
        << ")\n";
    out << "report: " << report_path.string() << '\n';
    return exit_ok;
  } catch (const SolveFailed& e) {
    report["result"] = {{"converged", false},
                        {"failure", e.what()},
                        {"residual", e.residual()},
                        {"history", history_json(e.history())}};
    write_text_file(report_path, dump_json(report));
    out << "solve failed: " << e.what() << "\nreport: " << report_path.string() << '\n';
    return exit_convergence;
  } catch (const InitializerError& e) {
    report["result"] = {{"converged", false}, {"failure", e.what()}};
    write_text_file(report_path, dump_json(report));
    out << "solve failed: " << e.what() << "\nreport: " << report_path.string() << '\n';
    return exit_convergence;
  }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto cached = problem_kernel(cfg);
  auto kernel = std::make_shared<const KernelTable>(cached.table);
  const ProblemSpec tmpl = make_problem(cfg, kernel, Mode::full, cfg.problem.lambda_grid.front());
  const ConvergenceReport rep = lambda_sweep(tmpl, cfg.problem.lambda_grid, cfg.solver);

  ordered_json report;
  report["command"] = "sweep";
  report["config"] = config_to_json(cfg);
  report["kernel"] = kernel_json(*kernel, cached.path);
  report["sweep"] = sweep_json(rep);
  const auto& dir = cfg.output.dir;
  write_text_file(dir / "sweep.csv", sweep_csv(rep));
  write_text_file(dir / "m_lambda.dat", sweep_plot_data(rep, PlotColumn::level));
  write_text_file(dir / "w22_dist.dat", sweep_plot_data(rep, PlotColumn::distance));
  write_text_file(dir / "sweep_report.json", dump_json(report));

  out << "m_omega = " << format_double(rep.omega_level) << '\n';
  for (const auto& row : rep.rows) {
    out << "lambda " << std::setw(8) << format_double(row.lambda) << ": ";
    if (row.converged) {
      out << "m = " << format_double(row.level) << ", |u - u_omega| / |u_omega| = "
          << format_double(row.w22_rel) << '\n';
    } else {
      out << "failed: " << row.failure << '\n';
    }
  }
  out << "output: " << dir.string() << '\n';
  return rep.all_converged ? exit_ok : exit_convergence;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  SuiteRunner runner(cfg);
  ordered_json suites = ordered_json::array();
  std::vector<std::string> failed;
  for (const auto& name : cfg.verify.suites) {
    const SuiteResult r = runner.run(name);
    out << name << ": " << (r.passed ? "PASS" : "FAIL");
    for (const auto& [k, v] : r.measured) out << ' ' << k << '=' << format_double(v);
    out << '\n';
    for (const auto& f : r.failures) out << "  " << f << '\n';
    if (!r.passed) failed.push_back(name);
    suites.push_back(suite_json(r));
  }
  ordered_json report;
  report["command"] = "verify";
  report["config"] = config_to_json(cfg);
  report["suites"] = suites;
  report["failed"] = failed;
  write_text_file(cfg.output.dir / "verify_report.json", dump_json(report));
  if (failed.empty()) return exit_ok;
  out << "failed suites:";
  for (const auto& f : failed) out << ' ' << f;
  out << '\n';
  return exit_verification;
}

int run_guarded(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return exit_convergence;
  } catch (const InitializerError& e) {
    err << "error: " << e.what() << '\n';
    return exit_convergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace choquard::cli
