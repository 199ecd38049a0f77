#include "fleet/campaign.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "fleet/metrics_io.hpp"
#include "json.hpp"

namespace fleet {

using nlohmann::json;

CampaignSpec parse_campaign(const std::string& text, const std::string& base_dir) {
  CampaignSpec spec;
  try {
    const json j = json::parse(text, nullptr, true, true);
    for (const auto& item : j.items()) {
      const std::string& k = item.key();
      if (k != "base_config" && k != "payload_masses" && k != "policies" && k != "seeds" && k != "max_cells" &&
          k != "write_run_files") {
        throw std::invalid_argument("campaign: unknown key '" + k + "'");
      }
    }
    std::filesystem::path cfg_path(j.at("base_config").get<std::string>());
    if (cfg_path.is_relative()) cfg_path = std::filesystem::path(base_dir) / cfg_path;
    spec.base = load_config(cfg_path.string());
    spec.payload_masses = j.value("payload_masses", std::vector<double>{spec.base.payload_mass_kg});
    spec.policies = j.value("policies", std::vector<std::string>{policy_name(spec.base.policy)});
    spec.seeds = j.value("seeds", std::vector<std::uint64_t>{spec.base.seed});
    spec.max_cells = j.value("max_cells", spec.max_cells);
    spec.write_run_files = j.value("write_run_files", false);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("campaign: ") + e.what());
  }
  if (spec.payload_masses.empty() || spec.policies.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("campaign axes must be non-empty");
  }
  for (const auto& p : spec.policies) (void)named_policy(p, spec.base.policy);
  const std::size_t cells = spec.payload_masses.size() * spec.policies.size() * spec.seeds.size();
  if (cells > spec.max_cells) {
    throw std::invalid_argument(fmt::format("campaign has {} cells, above the cap of {}", cells, spec.max_cells));
  }
  return spec;
}

CampaignSpec load_campaign(const std::string& path) {
  const std::filesystem::path p(path);
  return parse_campaign(read_text_file(path), p.parent_path().string());
}

std::vector<CampaignCell> expand_campaign(const CampaignSpec& spec) {
  std::vector<CampaignCell> cells;
  for (double m : spec.payload_masses) {
    for (const auto& policy : spec.policies) {
      for (std::uint64_t seed : spec.seeds) {
        CampaignCell c{m, policy, seed, spec.base};
        c.config.payload_mass_kg = m;
        c.config.seed = seed;
        c.config.policy = named_policy(policy, spec.base.policy);
        if (!spec.write_run_files) c.config.record_interval_s = 0.0;
        c.config.validate();
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

std::vector<CellResult> run_campaign(const CampaignSpec& spec, int jobs) {
  std::vector<CampaignCell> cells = expand_campaign(spec);
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      results[i].metrics = run(cells[i].config);
      results[i].cell = cells[i];
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

namespace {

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

template <typename F>
Stat stat_of(const std::vector<CellResult>& results, double mass, const std::string& policy, F value) {
  std::vector<double> v;
  for (const auto& r : results) {
    if (r.cell.payload_mass_kg == mass && r.cell.policy == policy) v.push_back(value(r));
  }
  Stat s;
  s.n = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = v.size() > 1 ? std::sqrt(s.stddev / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

}  // namespace

std::string operating_time_csv(const CampaignSpec& spec, const std::vector<CellResult>& results) {
  std::string out = "payload_mass_kg,policy,mean_operational_time_s,std_operational_time_s,runs\n";
  for (double m : spec.payload_masses) {
    for (const auto& p : spec.policies) {
      const Stat s = stat_of(results, m, p, [](const CellResult& r) { return r.metrics.summary.operational_time_s; });
      out += fmt::format("{},{},{:.3f},{:.3f},{}\n", m, p, s.mean, s.stddev, s.n);
    }
  }
  return out;
}

std::string replacement_count_csv(const CampaignSpec& spec, const std::vector<CellResult>& results) {
  std::string out = "payload_mass_kg,policy,mean_replacement_count,std_replacement_count,runs\n";
  for (double m : spec.payload_masses) {
    for (const auto& p : spec.policies) {
      const Stat s = stat_of(results, m, p, [](const CellResult& r) {
        return static_cast<double>(r.metrics.summary.replacement_count);
      });
      out += fmt::format("{},{},{:.3f},{:.3f},{}\n", m, p, s.mean, s.stddev, s.n);
    }
  }
  return out;
}

std::string replacement_histogram_csv(const CampaignSpec& spec, const std::vector<CellResult>& results) {
  std::string out = "policy,bin_low_pct,bin_high_pct,count\n";
  for (const auto& p : spec.policies) {
    std::array<long, 10> bins{};
    for (const auto& r : results) {
      if (r.cell.policy != p) continue;
      for (const auto& e : r.metrics.replacements) {
        const int b = std::clamp(static_cast<int>(std::floor(e.leaving_remaining_fraction * 10.0)), 0, 9);
        ++bins[static_cast<std::size_t>(b)];
      }
    }
    for (int b = 0; b < 10; ++b) {
      out += fmt::format("{},{},{},{}\n", p, b * 10, (b + 1) * 10, bins[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

std::string runs_csv(const std::vector<CellResult>& results) {
  std::string out =
      "payload_mass_kg,policy,seed,operational_time_s,sim_time_s,distance_m,waiting_time_s,replacement_count,"
      "hub_visits,termination,min_supporters,conservation_violations,separation_violations\n";
  for (const auto& r : results) {
    const RunSummary& s = r.metrics.summary;
    const RunAudit& a = r.metrics.audit;
    out += fmt::format("{},{},{},{:.3f},{:.3f},{:.4f},{:.3f},{},{},{},{},{},{}\n", r.cell.payload_mass_kg,
                       r.cell.policy, r.cell.seed, s.operational_time_s, s.sim_time_s, s.distance_m, s.waiting_time_s,
                       s.replacement_count, s.hub_visits, termination_name(s.termination), a.min_supporters,
                       a.conservation_violations, a.separation_violations);
  }
  return out;
}

std::string battery_profile_csv(const RunMetrics& metrics) {
  std::string out = "visit,time_s,hub_id";
  for (int id : metrics.profile_robot_ids) out += fmt::format(",robot_{}", id);
  out += "\n";
  for (std::size_t v = 0; v < metrics.hub_visits.size(); ++v) {
    const HubVisit& h = metrics.hub_visits[v];
    out += fmt::format("{},{:.3f},{}", v + 1, h.time_s, h.hub_id);
    for (double f : h.remaining_fraction) out += fmt::format(",{:.4f}", f);
    out += "\n";
  }
  return out;
}

void write_campaign_outputs(const std::string& dir, const CampaignSpec& spec, const std::vector<CellResult>& results) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  fs::create_directories(base / "profiles");
  write_text_file((base / "operating_time_vs_mass.csv").string(), operating_time_csv(spec, results));
  write_text_file((base / "replacement_count_vs_mass.csv").string(), replacement_count_csv(spec, results));
  write_text_file((base / "replacement_histogram.csv").string(), replacement_histogram_csv(spec, results));
  write_text_file((base / "runs.csv").string(), runs_csv(results));
  for (const auto& r : results) {
    const std::string stem = fmt::format("{}_m{}_s{}", r.cell.policy, r.cell.payload_mass_kg, r.cell.seed);
    write_text_file((base / "profiles" / (stem + ".csv")).string(), battery_profile_csv(r.metrics));
    if (spec.write_run_files) {
      write_run_outputs((base / "runs" / stem).string(), r.metrics, r.cell.config, "{}");
    }
  }
}

}  // namespace fleet
