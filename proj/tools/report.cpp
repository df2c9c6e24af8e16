#include "report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "choquard/errors.hpp"
#include "choquard/field.hpp"

namespace choquard::cli {

using nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json kernel_json(const KernelTable& table, const std::filesystem::path& cache_file) {
  return {{"kind", to_string(table.kind())},
          {"alpha", table.alpha()},
          {"dim", table.dim()},
          {"radius", table.window_radius()},
          {"method", to_string(table.method())},
          {"orbits", table.orbit_count()},
          {"quadrature_hash", hex64(table.quadrature().hash())},
          {"content_hash", hex64(table.content_hash())},
          {"cache_file", cache_file.filename().string()}};
}

ordered_json history_json(const std::vector<IterationRecord>& history) {
  ordered_json out = ordered_json::array();
  for (const auto& h : history) {
    out.push_back({{"iteration", h.iteration},
                   {"energy", h.energy},
                   {"dual_residual", h.dual_residual},
                   {"coord_residual", h.coord_residual},
                   {"nehari_F", h.nehari_F},
                   {"norm_sq", h.norm_sq},
                   {"step", h.step}});
  }
  return out;
}

ordered_json solve_result_json(const SolveResult& r) {
  ordered_json starts = ordered_json::array();
  for (std::size_t k = 0; k < r.start_levels.size(); ++k)
    starts.push_back({{"label", r.start_labels.at(k)}, {"level", r.start_levels[k]}});
  return {{"converged", r.converged},
          {"level", r.level},
          {"norm_sq", r.norm_sq},
          {"dual_residual", r.dual_residual},
          {"coord_residual", r.coord_residual},
          {"nehari_defect", r.nehari_defect},
          {"iterations", r.iterations},
          {"best_start", r.best_start},
          {"starts", starts},
          {"history", history_json(r.history)}};
}

ordered_json sweep_json(const ConvergenceReport& rep) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : rep.rows) {
    ordered_json j{{"lambda", row.lambda}, {"converged", row.converged}};
    if (row.converged) {
      j["m_lambda"] = row.level;
      j["w22_dist"] = row.w22_dist;
      j["w22_rel"] = row.w22_rel;
      j["outside_mass"] = row.outside_mass;
      j["outside_mass_weighted"] = row.outside_mass_weighted;
      j["iterations"] = row.iterations;
      j["residual"] = row.residual;
      j["start_levels"] = row.start_levels;
    } else {
      j["failure"] = row.failure;
    }
    rows.push_back(std::move(j));
  }
  return {{"m_omega", rep.omega_level},
          {"omega_w22_norm", rep.omega_w22_norm},
          {"omega_iterations", rep.omega_iterations},
          {"omega_residual", rep.omega_residual},
          {"rows", rows},
          {"verdicts",
           {{"all_converged", rep.all_converged},
            {"levels_nondecreasing", rep.levels_nondecreasing},
            {"levels_below_omega", rep.levels_below_omega},
            {"final_level_gap", rep.final_level_gap},
            {"distance_decreasing", rep.distance_decreasing},
            {"outside_mass_decreasing", rep.outside_mass_decreasing}}}};
}

std::string sweep_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "lambda,m_lambda,w22_dist,outside_mass,iterations,residual,status\n";
  for (const auto& row : rep.rows) {
    os << format_double(row.lambda) << ',';
    if (row.converged) {
      os << format_double(row.level) << ',' << format_double(row.w22_dist) << ','
         << format_double(row.outside_mass) << ',' << row.iterations << ','
         << format_double(row.residual) << ",ok\n";
    } else {
      os << ",,,,,failed\n";
    }
  }
  os << "# m_omega " << format_double(rep.omega_level) << '\n';
  return os.str();
}

std::string sweep_plot_data(const ConvergenceReport& rep, PlotColumn column) {
  std::ostringstream os;
  os << (column == PlotColumn::level ? "# log10_lambda m_lambda\n" : "# log10_lambda w22_dist\n");
  for (const auto& row : rep.rows) {
    if (!row.converged) continue;
    os << format_double(std::log10(row.lambda)) << ' '
       << format_double(column == PlotColumn::level ? row.level : row.w22_dist) << '\n';
  }
  return os.str();
}

}  // namespace choquard::cli
