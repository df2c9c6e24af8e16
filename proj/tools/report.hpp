#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "choquard/kernels.hpp"
#include "choquard/solver.hpp"

namespace choquard::cli {

/// Writes through a temporary file and a rename; creates parent directories.
/// Throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Pretty-printed JSON with a trailing newline. NaN becomes null.
std::string dump_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json kernel_json(const KernelTable& table, const std::filesystem::path& cache_file);
nlohmann::ordered_json history_json(const std::vector<IterationRecord>& history);
nlohmann::ordered_json solve_result_json(const SolveResult& r);
nlohmann::ordered_json sweep_json(const ConvergenceReport& rep);

/// lambda,m_lambda,w22_dist,outside_mass,iterations,residual,status rows and
/// a "# m_omega <value>" footer. Failed rows leave the numeric columns empty.
std::string sweep_csv(const ConvergenceReport& rep);

enum class PlotColumn { level, distance };

/// Two columns, log10(lambda) and the chosen quantity, converged rows only.
std::string sweep_plot_data(const ConvergenceReport& rep, PlotColumn column);

}  // namespace choquard::cli
