#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace cli = choquard::cli;

namespace {

struct Overrides {
  std::string config;
  std::optional<int> dim, radius, omega_radius;
  std::optional<double> alpha, p, lambda;
  std::optional<std::string> lambda_grid, kernel, mode, out, cache_dir, suites;
  std::optional<std::uint64_t> seed;
};

void add_options(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--dim", o.dim, "lattice dimension N");
  app.add_option("--radius", o.radius, "window radius R");
  app.add_option("--alpha", o.alpha, "kernel order alpha in (0, N)");
  app.add_option("--p", o.p, "nonlinearity exponent");
  app.add_option("--lambda", o.lambda, "potential depth for solve");
  app.add_option("--lambda-grid", o.lambda_grid, "comma-separated increasing lambda values");
  app.add_option("--omega-radius", o.omega_radius, "radius of the well B_r(e)");
  app.add_option("--kernel", o.kernel, "green or riesz");
  app.add_option("--mode", o.mode, "full or dirichlet");
  app.add_option("--seed", o.seed, "seed for solver restarts and verification sampling");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--cache-dir", o.cache_dir, "kernel cache directory");
  app.add_option("--suites", o.suites, "comma-separated verification suites");
}

cli::RunConfig resolve(const Overrides& o) {
  cli::RunConfig c = o.config.empty() ? cli::RunConfig{} : cli::load_config(o.config);
  auto& pr = c.problem;
  if (o.dim) pr.dim = *o.dim;
  if (o.radius) pr.radius = *o.radius;
  if (o.omega_radius) pr.omega_radius = *o.omega_radius;
  if (o.alpha) pr.alpha = *o.alpha;
  if (o.p) pr.p = *o.p;
  if (o.lambda) pr.lambda = *o.lambda;
  if (o.lambda_grid) pr.lambda_grid = cli::parse_number_list(*o.lambda_grid);
  try {
    if (o.kernel) pr.kernel = choquard::parse_kernel_kind(*o.kernel);
    if (o.mode) pr.mode = choquard::parse_mode(*o.mode);
  } catch (const std::invalid_argument& e) {
    throw cli::ConfigError(e.what());
  }
  if (o.seed) c.solver.seed = c.verify.seed = *o.seed;
  if (o.out) c.output.dir = *o.out;
  if (o.cache_dir) c.output.cache_dir = *o.cache_dir;
  if (o.suites) c.verify.suites = cli::parse_name_list(*o.suites);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the discrete Choquard equation on Z^N", "choquard"};
  app.require_subcommand(1);
  Overrides o;
  add_options(app, o);

  using Command = int (*)(const cli::RunConfig&, std::ostream&);
  Command chosen = nullptr;
  const std::pair<const char*, std::pair<const char*, Command>> commands[] = {
      {"kernel", {"build or load the kernel table and summarise it", cli::cmd_kernel}},
      {"solve", {"compute a ground state", cli::cmd_solve}},
      {"sweep", {"solve along the lambda grid and compare with the well problem", cli::cmd_sweep}},
      {"verify", {"run property suites", cli::cmd_verify}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    sub->callback([&chosen, fn = entry.second] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_usage;
  }

  if (!o.config.empty() && !std::filesystem::exists(o.config)) {
    std::cerr << "error: config file '" << o.config << "' not found\n\n" << app.help();
    return cli::exit_usage;
  }
  return cli::run_guarded([&] { return chosen(resolve(o), std::cout); }, std::cerr);
}
