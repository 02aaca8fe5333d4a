#include "aoisim/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "aoisim/analysis.hpp"

namespace aoisim::report {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_experiment_rows(Table& table, const ExperimentConfig& config) {
  Aggregate agg = run_experiment(config);
  double bound = analysis::lower_bound(config.p);
  for (std::size_t i = 0; i < agg.grid.size(); ++i) {
    table.rows.push_back({agg.grid[i], config.p, config.policy,
                          agg.mean_aoi[i], agg.stderr_aoi[i], bound});
  }
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const Row& r : table.rows) {
    out += num(r.horizon);
    out += ',';
    out += num(r.p);
    out += ',';
    out += r.policy;
    out += ',';
    out += num(r.mean_aoi);
    out += ',';
    out += num(r.stderr_aoi);
    out += ',';
    out += num(r.bound);
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Row& r : table.rows) {
    rows.push_back({{"T", r.horizon},
                    {"p", r.p},
                    {"policy", r.policy},
                    {"mean_aoi", r.mean_aoi},
                    {"stderr", r.stderr_aoi},
                    {"lower_bound", r.bound}});
  }
  return rows.dump(2) + "\n";
}

Table run_table(const ExperimentConfig& config) {
  config.validate();
  Table table;
  append_experiment_rows(table, config);
  return table;
}

Table preset_fig3(std::uint64_t seed, int workers, int paths, double horizon,
                  int grid_points) {
  Table table;
  for (double p : {0.2, 0.6, 1.0}) {
    ExperimentConfig config;
    config.p = p;
    config.horizon = horizon;
    config.paths = paths;
    config.seed = seed;
    config.policy = "bu";
    config.workers = workers;
    config.sample_grid = log_grid(horizon, grid_points);
    append_experiment_rows(table, config);
  }
  return table;
}

Table preset_fig4(std::uint64_t seed, int workers, int paths, double horizon,
                  double t0, int grid_points) {
  Table table;
  for (const char* policy : {"bu", "bu-er", "greedy"}) {
    ExperimentConfig config;
    config.p = 0.6;
    config.horizon = horizon;
    config.paths = paths;
    config.seed = seed;
    config.policy = policy;
    config.t0 = t0;
    config.workers = workers;
    config.sample_grid = log_grid(horizon, grid_points);
    append_experiment_rows(table, config);
  }
  return table;
}

std::string records_to_jsonl(const Aggregate& aggregate,
                             const ExperimentConfig& config) {
  std::string out;
  for (std::size_t i = 0; i < aggregate.records.size(); ++i) {
    const SimRecord& r = aggregate.records[i];
    nlohmann::ordered_json line{{"path", i},
                                {"attempts", r.attempts},
                                {"deliveries", r.deliveries},
                                {"final_battery", r.final_battery},
                                {"max_battery", r.max_battery},
                                {"aoi", r.aoi_per_grid}};
    if (!r.t1_samples.empty()) {
      line["t1"] = r.t1_samples;
      line["t2"] = r.t2_samples;
      line["tail"] = r.tail_samples;
    }
    if (config.retain_paths) {
      line["attempt_epochs"] = r.attempt_epochs;
      line["delivery_epochs"] = r.delivery_epochs;
      line["arrival_times"] = r.arrival_times;
    }
    out += line.dump();
    out += '\n';
  }
  return out;
}

void write_file(const std::string& text, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << text;
  if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace aoisim::report
