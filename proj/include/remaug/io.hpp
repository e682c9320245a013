#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "remaug/evaluate.hpp"
#include "remaug/scenario.hpp"
#include "remaug/selector.hpp"

namespace remaug::io {

using ordered_json = nlohmann::ordered_json;

// Grid CSV: row-major, comma-separated, 6 decimal places, `nan` for MISSING,
// LF line endings. The grid geometry travels in a sidecar meta JSON
// ("<stem>.meta.json" next to the CSV).

std::string map_to_csv(const RadioMap& map);
RadioMap map_from_csv(const std::string& csv, const GridSpec& grid);

void write_map_csv(const std::string& path, const RadioMap& map);
RadioMap read_map_csv(const std::string& path, const GridSpec& grid);

/// "<dir>/<stem>.meta.json" for "<dir>/<stem>.csv" (or any extension).
std::string meta_path_for(const std::string& csv_path);

// Samples CSV: header `x_m,y_m,value_dbm` with optional `z_m`; `.` decimal,
// UTF-8, LF or CRLF accepted, LF emitted.
std::string samples_to_csv(const SampleSet& s);
SampleSet samples_from_csv(const std::string& csv);
void write_samples_csv(const std::string& path, const SampleSet& s);
SampleSet read_samples_csv(const std::string& path);

// JSON bindings. Parsers reject unknown keys.
ordered_json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);
ordered_json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
ordered_json mask_to_json(const MaskSpec& m);
MaskSpec mask_from_json(const nlohmann::json& j);

/// Flat feature object; throws InvalidInput listing valid keys on an
/// unknown key.
ScenarioFeatures features_from_json(const nlohmann::json& j);
const std::vector<std::string>& feature_keys();

/// Stable-key-order recommendation document.
ordered_json recommendation_to_json(const Recommendation& rec);

ReconstructMethod method_from_json(const nlohmann::json& j);
ordered_json method_to_json(const ReconstructMethod& m);

struct BenchmarkRun {
    BenchmarkConfig config;
    std::vector<OrderingAssertion> assertions;
};
BenchmarkRun benchmark_run_from_json(const nlohmann::json& j);

ordered_json report_to_json(const BenchmarkReport& report, const ordered_json& config_echo,
                            const std::vector<AssertionResult>& assertions);
std::string report_to_csv(const BenchmarkReport& report);

// Small file helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
nlohmann::json parse_json_file(const std::string& path);

}  // namespace remaug::io
