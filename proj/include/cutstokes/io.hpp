#pragma once

#include "cutstokes/experiments.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cutstokes {

inline constexpr int kCsvSchemaVersion = 1;

/// Fixed 17-significant-digit formatting; NaN and infinities are spelled
/// "nan", "inf", "-inf".
std::string format_double(double value);

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& table);
void write_slopes_json(const std::filesystem::path& path, const ConvergenceTable& table);

/// Rows beta, columns l (header "beta,l_0.990,...").
void write_condition_csv(const std::filesystem::path& path, const std::vector<ConditionCell>& cells,
                         const std::vector<double>& l_list, const std::vector<double>& beta_list);
void write_condition_long_csv(const std::filesystem::path& path, const std::vector<ConditionCell>& cells);

void write_patch_csv(const std::filesystem::path& path, const std::vector<PatchTestResult>& results);

struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> outputs;
  double wall_clock_seconds = 0.0;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace cutstokes
