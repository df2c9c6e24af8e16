#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "choquard/errors.hpp"

namespace choquard::cli {

using nlohmann::ordered_json;

namespace {

// Reads the members of one JSON object, remembering which keys were used so
// that leftovers can be rejected.
class BlockReader {
 public:
  BlockReader(const ordered_json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  const ordered_json* find(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const char* key, int& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      out = v->get<int>();
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail(key, "a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const char* key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void read(const char* key, std::filesystem::path& out) {
    std::string s = out.string();
    read(key, s);
    out = s;
  }
  void read(const char* key, std::vector<double>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(key, "an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }
  void read(const char* key, std::vector<std::string>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of strings");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_string()) fail(key, "an array of strings");
        out.push_back(x.get<std::string>());
      }
    }
  }
  template <typename Enum, typename Parse>
  void read_enum(const char* key, Enum& out, Parse parse) {
    std::string name;
    if (find(key)) {
      read(key, name);
      try {
        out = parse(name);
      } catch (const InputError& e) {
        throw ConfigError(where_ + "." + key + ": " + e.what());
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError(where_ + "." + key + ": expected " + what);
  }

  const ordered_json& j_;
  std::string where_;
  std::set<std::string> used_;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names{
      "operators", "heat", "green", "green_identity", "hls",
      "brezis_lieb", "lions", "nehari", "mountain_pass", "embedding"};
  return names;
}

void RunConfig::validate() const {
  const auto& pr = problem;
  if (pr.dim < 1) throw ConfigError("problem.dim must be >= 1");
  if (pr.radius < 1) throw ConfigError("problem.radius must be >= 1");
  if (pr.omega_radius < 0) throw ConfigError("problem.omega_radius must be >= 0");
  if (pr.lambda_grid.empty()) throw ConfigError("problem.lambda_grid must not be empty");
  for (std::size_t k = 0; k < pr.lambda_grid.size(); ++k) {
    if (!(pr.lambda_grid[k] > 0.0) || !std::isfinite(pr.lambda_grid[k]))
      throw ConfigError("problem.lambda_grid entries must be positive");
    if (k > 0 && !(pr.lambda_grid[k] > pr.lambda_grid[k - 1]))
      throw ConfigError("problem.lambda_grid must be strictly increasing");
  }
  for (const auto& s : verify.suites) {
    if (std::find(all_suites().begin(), all_suites().end(), s) == all_suites().end())
      throw ConfigError("verify.suites: unknown suite '" + s + "'");
  }
  if (verify.green_radius < 4) throw ConfigError("verify.green_radius must be >= 4");
  if (verify.hls_samples < 1 || verify.samples < 1)
    throw ConfigError("verify sample counts must be >= 1");
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
  try {
    quadrature.validate();
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (solver.initializer == Initializer::supplied && initial_field.empty())
    throw ConfigError("solver.initial_field is required by the supplied initializer");
}

RunConfig config_from_json(const ordered_json& j) {
  RunConfig c;
  BlockReader top(j, "config");

  if (const auto* b = top.find("problem")) {
    BlockReader r(*b, "problem");
    auto& pr = c.problem;
    r.read("dim", pr.dim);
    r.read("radius", pr.radius);
    r.read("alpha", pr.alpha);
    r.read("p", pr.p);
    r.read("lambda", pr.lambda);
    r.read("lambda_grid", pr.lambda_grid);
    r.read("omega_radius", pr.omega_radius);
    r.read_enum("potential", pr.profile, parse_potential_profile);
    r.read("bound", pr.bound);
    r.read("cap", pr.cap);
    r.read_enum("kernel", pr.kernel, parse_kernel_kind);
    r.read_enum("mode", pr.mode, parse_mode);
    r.finish();
  }
  if (const auto* b = top.find("quadrature")) {
    BlockReader r(*b, "quadrature");
    auto& q = c.quadrature;
    r.read("t_split", q.t_split);
    r.read("t_tail", q.t_tail);
    r.read("nodes", q.nodes);
    r.read("panel_width", q.panel_width);
    r.read("eps", q.eps);
    r.finish();
  }
  if (const auto* b = top.find("solver")) {
    BlockReader r(*b, "solver");
    auto& s = c.solver;
    r.read("max_iterations", s.max_iterations);
    r.read("residual_tol", s.residual_tol);
    r.read("nehari_tol", s.nehari_tol);
    r.read("cg_tol", s.cg_tol);
    r.read("cg_max_iterations", s.cg_max_iterations);
    r.read("shrink", s.shrink);
    r.read("armijo", s.armijo);
    r.read("min_step", s.min_step);
    r.read_enum("initializer", s.initializer, parse_initializer);
    r.read("initial_field", c.initial_field);
    r.read("restarts", s.restarts);
    r.read("seed", s.seed);
    r.finish();
  }
  if (const auto* b = top.find("output")) {
    BlockReader r(*b, "output");
    r.read("dir", c.output.dir);
    r.read("cache_dir", c.output.cache_dir);
    r.finish();
  }
  if (const auto* b = top.find("verify")) {
    BlockReader r(*b, "verify");
    auto& v = c.verify;
    r.read("suites", v.suites);
    r.read("seed", v.seed);
    r.read("green_radius", v.green_radius);
    r.read("hls_samples", v.hls_samples);
    r.read("samples", v.samples);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  const auto& pr = c.problem;
  j["problem"] = {{"dim", pr.dim},
                  {"radius", pr.radius},
                  {"alpha", pr.alpha},
                  {"p", pr.p},
                  {"lambda", pr.lambda},
                  {"lambda_grid", pr.lambda_grid},
                  {"omega_radius", pr.omega_radius},
                  {"potential", to_string(pr.profile)},
                  {"bound", pr.bound},
                  {"cap", pr.cap},
                  {"kernel", to_string(pr.kernel)},
                  {"mode", to_string(pr.mode)}};
  const auto& q = c.quadrature;
  j["quadrature"] = {{"t_split", q.t_split},
                     {"t_tail", q.t_tail},
                     {"nodes", q.nodes},
                     {"panel_width", q.panel_width},
                     {"eps", q.eps}};
  const auto& s = c.solver;
  j["solver"] = {{"max_iterations", s.max_iterations},
                 {"residual_tol", s.residual_tol},
                 {"nehari_tol", s.nehari_tol},
                 {"cg_tol", s.cg_tol},
                 {"cg_max_iterations", s.cg_max_iterations},
                 {"shrink", s.shrink},
                 {"armijo", s.armijo},
                 {"min_step", s.min_step},
                 {"initializer", to_string(s.initializer)},
                 {"initial_field", c.initial_field.string()},
                 {"restarts", s.restarts},
                 {"seed", s.seed}};
  j["output"] = {{"dir", c.output.dir.string()}, {"cache_dir", c.output.cache_dir.string()}};
  const auto& v = c.verify;
  j["verify"] = {{"suites", v.suites},
                 {"seed", v.seed},
                 {"green_radius", v.green_radius},
                 {"hls_samples", v.hls_samples},
                 {"samples", v.samples}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : parse_name_list(text)) {
    try {
      out.push_back(parse_double(item));
    } catch (const IoError&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

LatticeWindow problem_window(const RunConfig& c) {
  return LatticeWindow(c.problem.dim, c.problem.radius);
}

PotentialSpec problem_potential(const RunConfig& c) {
  return PotentialSpec(ball(Site(static_cast<std::size_t>(c.problem.dim), 0), c.problem.omega_radius),
                       c.problem.bound, c.problem.profile, c.problem.cap);
}

ProblemSpec make_problem(const RunConfig& c, std::shared_ptr<const KernelTable> kernel, Mode mode,
                         double lambda) {
  return ProblemSpec(mode, problem_window(c), problem_potential(c), std::move(kernel), c.problem.p,
                     lambda);
}

}  // namespace choquard::cli
