#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fleet/config.hpp"
#include "fleet/engine.hpp"

namespace fleet {

struct CampaignSpec {
  WorldConfig base;
  std::vector<double> payload_masses;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  std::size_t max_cells = 2000;
  bool write_run_files = false;  // per-cell ticks/replacements/summary
};

struct CampaignCell {
  double payload_mass_kg = 0.0;
  std::string policy;
  std::uint64_t seed = 0;
  WorldConfig config;
};

struct CellResult {
  CampaignCell cell;
  RunMetrics metrics;
};

/// JSON: {"base_config": path (relative to the campaign file), "payload_masses": [...],
///        "policies": [...], "seeds": [...], "max_cells": n, "write_run_files": bool}
CampaignSpec parse_campaign(const std::string& text, const std::string& base_dir);
CampaignSpec load_campaign(const std::string& path);

/// Cartesian product in mass-major, policy, seed order.
std::vector<CampaignCell> expand_campaign(const CampaignSpec& spec);

/// Runs every cell on up to `jobs` threads; results keep cell order.
std::vector<CellResult> run_campaign(const CampaignSpec& spec, int jobs);

/// Aggregate CSVs plus one battery-profile matrix per run.
void write_campaign_outputs(const std::string& dir, const CampaignSpec& spec, const std::vector<CellResult>& results);

std::string operating_time_csv(const CampaignSpec& spec, const std::vector<CellResult>& results);
std::string replacement_count_csv(const CampaignSpec& spec, const std::vector<CellResult>& results);
std::string replacement_histogram_csv(const CampaignSpec& spec, const std::vector<CellResult>& results);
std::string runs_csv(const std::vector<CellResult>& results);
std::string battery_profile_csv(const RunMetrics& metrics);

}  // namespace fleet
