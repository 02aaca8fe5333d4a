#pragma once

#include <string>
#include <vector>

#include "aoisim/engine.hpp"

namespace aoisim::report {

struct Row {
  double horizon = 0.0;
  double p = 0.0;
  std::string policy;
  double mean_aoi = 0.0;
  double stderr_aoi = 0.0;
  double bound = 0.0;
};

struct Table {
  std::vector<Row> rows;
};

inline constexpr const char* kCsvHeader =
    "T,p,policy,mean_aoi,stderr,lower_bound";

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

// One row per grid point for a single experiment.
Table run_table(const ExperimentConfig& config);

// BU at p in {0.2, 0.6, 1.0}, 500 paths, log grid of horizons up to T=5000.
Table preset_fig3(std::uint64_t seed = 42, int workers = 0, int paths = 500,
                  double horizon = 5000.0, int grid_points = 50);

// BU, BU-ER(T0) and greedy at p=0.6, 500 paths, horizons up to T=5000.
Table preset_fig4(std::uint64_t seed = 42, int workers = 0, int paths = 500,
                  double horizon = 5000.0, double t0 = 30.0,
                  int grid_points = 50);

// Per-path record dump: one JSON object per line. Fields: path, attempts,
// deliveries, final_battery, max_battery, aoi (per grid point), and for
// renewal policies t1/t2/tail sample arrays; full logs when retained.
std::string records_to_jsonl(const Aggregate& aggregate,
                             const ExperimentConfig& config);

void write_file(const std::string& text, const std::string& path);

}  // namespace aoisim::report
