#pragma once

// Scenario files and JSON encodings of results.

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "homokinetics/analysis.hpp"
#include "homokinetics/dsmc.hpp"
#include "homokinetics/hilbert.hpp"
#include "homokinetics/linop.hpp"

namespace homokinetics {

inline constexpr int kScenarioSchema = 1;

struct AnalysisSpec {
  std::string column = "beta";
  Abscissa abscissa = Abscissa::T;
  FitWindow window;
  std::optional<double> tolerance;
  std::optional<double> b;          // Green-Kubo constant for prefactors
  std::optional<BasisSpec> basis;   // computes b when `b` is absent
};

struct Scenario {
  std::string name;
  SimConfig sim;
  AnalysisSpec analysis;
  std::filesystem::path output_directory = ".";

  std::filesystem::path csv_path() const { return output_directory / (name + ".csv"); }
  std::filesystem::path report_path() const { return output_directory / (name + ".report.json"); }
};

/// Throws ConfigError naming the offending field; syntax errors carry the line.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& s);

/// Parses {"case": ..., "K": ...} or {"matrix": [9 numbers, row major]}.
SimConfig& apply_flow(SimConfig& sim, const nlohmann::json& flow, const std::string& path = "flow");
FlowCase flow_case_from_json(const nlohmann::json& j, const std::string& path = "flow");
Eigen::Matrix3d matrix_from_json(const nlohmann::json& j, const std::string& path = "matrix");

nlohmann::json to_json(const FlowCase& c);
nlohmann::json to_json(const KernelSpec& k);
nlohmann::json to_json(const Prediction& p);
nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const Comparison& c);

}  // namespace homokinetics
