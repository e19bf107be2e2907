#include "cutstokes/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cutstokes {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot open " + path.string() + " for writing");
  return out;
}

std::string format_l(double l) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", l);
  return buf;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& table) {
  auto out = open_output(path);
  out << "# schema_version=" << kCsvSchemaVersion << "\n";
  out << "config,pair,N,h_max,err_u_H1,err_p_L2\n";
  for (const auto& row : table.rows) {
    const double nan = std::nan("");
    out << to_string(row.config) << ',' << to_string(row.pair) << ',' << row.N << ','
        << format_double(row.h_max) << ',' << format_double(row.ok ? row.err_u_H1 : nan) << ','
        << format_double(row.ok ? row.err_p_L2 : nan) << '\n';
  }
}

void write_slopes_json(const std::filesystem::path& path, const ConvergenceTable& table) {
  nlohmann::ordered_json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["slopes"] = nlohmann::ordered_json::array();
  for (const auto& fit : table.slopes) {
    nlohmann::ordered_json e;
    e["config"] = std::string(to_string(fit.config));
    e["pair"] = std::string(to_string(fit.pair));
    e["ok"] = fit.ok;
    if (fit.ok) {
      e["slope_u_H1"] = fit.slope_u_H1;
      e["slope_p_L2"] = fit.slope_p_L2;
    } else {
      e["slope_u_H1"] = nullptr;
      e["slope_p_L2"] = nullptr;
    }
    j["slopes"].push_back(e);
  }
  j["failed_rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    if (row.ok) continue;
    j["failed_rows"].push_back({{"config", std::string(to_string(row.config))},
                                {"pair", std::string(to_string(row.pair))},
                                {"N", row.N},
                                {"message", row.message}});
  }
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_condition_csv(const std::filesystem::path& path, const std::vector<ConditionCell>& cells,
                         const std::vector<double>& l_list, const std::vector<double>& beta_list) {
  if (cells.size() != l_list.size() * beta_list.size())
    throw ContractViolation("write_condition_csv: cell count does not match the grid");
  auto out = open_output(path);
  out << "# schema_version=" << kCsvSchemaVersion << "\n";
  out << "beta";
  for (double l : l_list) out << ",l_" << format_l(l);
  out << '\n';
  for (std::size_t b = 0; b < beta_list.size(); ++b) {
    out << format_double(beta_list[b]);
    for (std::size_t i = 0; i < l_list.size(); ++i) {
      const auto& cell = cells[b * l_list.size() + i];
      out << ',' << format_double(cell.ok ? cell.spectrum.kappa_scaled : std::nan(""));
    }
    out << '\n';
  }
}

void write_condition_long_csv(const std::filesystem::path& path, const std::vector<ConditionCell>& cells) {
  auto out = open_output(path);
  out << "# schema_version=" << kCsvSchemaVersion << "\n";
  out << "pair,beta,l,n_dofs,h,lambda_max_abs,lambda_min_abs_nonzero,kappa,kappa_scaled,near_zero_count,"
         "unexpected_kernel_dimension,ok\n";
  for (const auto& c : cells) {
    const auto& s = c.spectrum;
    out << to_string(c.pair) << ',' << format_double(c.beta) << ',' << format_double(c.l) << ',' << c.n_dofs
        << ',' << format_double(s.h) << ',' << format_double(s.lambda_max_abs) << ','
        << format_double(s.lambda_min_abs_nonzero) << ',' << format_double(s.kappa) << ','
        << format_double(s.kappa_scaled) << ',' << s.near_zero_count << ','
        << (s.unexpected_kernel_dimension ? 1 : 0) << ',' << (c.ok ? 1 : 0) << '\n';
  }
}

void write_patch_csv(const std::filesystem::path& path, const std::vector<PatchTestResult>& results) {
  auto out = open_output(path);
  out << "# schema_version=" << kCsvSchemaVersion << "\n";
  out << "name,pair,config,N,status,max_dof_error,message\n";
  for (const auto& r : results) {
    const char* status = r.skipped ? "skipped" : (r.passed ? "pass" : "fail");
    out << r.name << ',' << to_string(r.pair) << ',' << to_string(r.config) << ',' << r.N << ',' << status << ','
        << format_double(r.skipped ? std::nan("") : r.max_dof_error) << ",\"" << r.message << "\"\n";
  }
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["subcommand"] = manifest.subcommand;
  j["tool_version"] = CUTSTOKES_VERSION;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["deterministic"] = true;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : manifest.parameters) params[k] = v;
  j["parameters"] = params;
  j["outputs"] = manifest.outputs;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  auto out = open_output(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace cutstokes
