#pragma once

#include <string>

#include "fleet/engine.hpp"

namespace fleet {

/// time_s,robot_id,role,voltage_v,discharge_mah,x_m,y_m
std::string ticks_csv(const RunMetrics& metrics);
std::string replacements_csv(const RunMetrics& metrics);
/// JSON summary; `overrides_json` is echoed verbatim under "overrides".
std::string summary_json(const RunMetrics& metrics, const WorldConfig& config, const std::string& overrides_json);

/// Writes ticks.csv, replacements.csv and summary.json into `dir`.
void write_run_outputs(const std::string& dir, const RunMetrics& metrics, const WorldConfig& config,
                       const std::string& overrides_json);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace fleet
