#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoisim/analysis.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/report.hpp"

namespace {

using aoisim::ExperimentConfig;

struct OutputOptions {
  std::string out;            // empty -> stdout
  std::string format = "csv";
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--out", opts.out, "Output file (default: stdout)");
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void emit_table(const aoisim::report::Table& table, const OutputOptions& opts) {
  std::string text = opts.format == "json" ? aoisim::report::to_json(table)
                                           : aoisim::report::to_csv(table);
  if (opts.out.empty()) {
    std::cout << text;
  } else {
    aoisim::report::write_file(text, opts.out);
  }
}

std::string config_key_values(const ExperimentConfig& config, int grid_points,
                              const OutputOptions& opts) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "policy=%s\np=%.12g\nT=%.12g\nT0=%.12g\npaths=%d\nseed=%llu\n"
                "E0=%ld\nworkers=%d\ngrid-points=%d\nformat=%s\n",
                config.policy.c_str(), config.p, config.horizon, config.t0,
                config.paths, static_cast<unsigned long long>(config.seed),
                config.initial_energy, config.workers, grid_points,
                opts.format.c_str());
  return buf;
}

int run_diagnostics(std::uint64_t seed, int workers, std::size_t kappa_samples,
                    std::uint64_t kappa_cap, const std::string& out) {
  namespace an = aoisim::analysis;
  bool all_ok = true;
  std::vector<std::string> csv_rows;
  auto note = [&](const std::string& check, const std::string& metric,
                  double value, bool ok, bool counts = true) {
    std::printf("%s.%s: %.6g%s\n", check.c_str(), metric.c_str(), value,
                counts ? (ok ? "  [ok]" : "  [FAIL]") : "");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.12g,%d\n", check.c_str(),
                  metric.c_str(), value, ok ? 1 : 0);
    csv_rows.push_back(buf);
    if (counts && !ok) all_ok = false;
  };

  // Exponential-martingale lower bound on the walk hitting time.
  auto samples = an::sample_hitting_times(seed, kappa_samples, kappa_cap);
  const double alphas[] = {1.0, 0.3, 0.1};
  for (const auto& row : an::martingale_bound_check(alphas, samples)) {
    char metric[64];
    std::snprintf(metric, sizeof(metric), "bound_alpha_%.2g", row.alpha);
    note("martingale", metric, row.bound, row.satisfied, false);
    note("martingale", std::string(metric) + "_satisfied",
         row.satisfied ? 1.0 : 0.0, row.satisfied);
  }

  // Censored-mean growth in the cap: the hitting time has no finite mean.
  auto small = an::sample_hitting_times(seed, kappa_samples, 1000);
  double mean_small = 0.0, mean_large = 0.0;
  for (const auto& s : small) mean_small += static_cast<double>(s.steps);
  for (const auto& s : samples) mean_large += static_cast<double>(s.steps);
  mean_small /= static_cast<double>(small.size());
  mean_large /= static_cast<double>(samples.size());
  note("hitting_time", "censored_mean_cap_1e3", mean_small, true, false);
  note("hitting_time", "censored_mean_cap_full", mean_large, true, false);
  note("hitting_time", "growth_factor", mean_large / mean_small,
       mean_large / mean_small > 5.0);

  // Stage-2 duration law.
  ExperimentConfig t2cfg;
  t2cfg.policy = "bu-er";
  t2cfg.p = 0.6;
  t2cfg.t0 = 10.0;
  t2cfg.horizon = 1000.0;
  t2cfg.paths = 300;
  t2cfg.seed = seed;
  t2cfg.workers = workers;
  auto t2agg = aoisim::run_experiment(t2cfg);
  std::vector<double> t2;
  for (const auto& r : t2agg.records) {
    t2.insert(t2.end(), r.t2_samples.begin(), r.t2_samples.end());
  }
  auto gof = an::t2_distribution_check(t2);
  note("t2_law", "samples", static_cast<double>(t2.size()), true, false);
  note("t2_law", "chi2_p_value", gof.p_value, gof.gof_ok);
  note("t2_law", "mean", gof.sample_mean, gof.mean_ok, false);
  note("t2_law", "mean_z", gof.mean_z, gof.mean_ok);

  // Stage-1 residual stays bounded across T0.
  const double t0_grid[] = {10.0, 30.0, 100.0, 300.0};
  std::vector<std::vector<double>> tails;
  for (double t0 : t0_grid) {
    ExperimentConfig cfg = t2cfg;
    cfg.t0 = t0;
    cfg.horizon = 3000.0;
    cfg.paths = 60;
    auto agg = aoisim::run_experiment(cfg);
    std::vector<double> t;
    for (const auto& r : agg.records) {
      t.insert(t.end(), r.tail_samples.begin(), r.tail_samples.end());
    }
    tails.push_back(std::move(t));
  }
  auto tail = an::renewal_tail_check(t0_grid, tails);
  note("renewal_tail", "mean_ratio", tail.mean_ratio, tail.bounded, false);
  note("renewal_tail", "m2_ratio", tail.m2_ratio, tail.bounded);

  // BU-ER long-run age trends down toward the bound as T0 grows.
  ExperimentConfig conv;
  conv.p = 0.6;
  conv.horizon = 2000.0;
  conv.paths = 200;
  conv.seed = seed;
  conv.workers = workers;
  const double conv_grid[] = {5.0, 30.0, 100.0};
  auto report = an::theorem1_convergence(conv, conv_grid);
  for (std::size_t i = 0; i < report.t0_grid.size(); ++i) {
    char metric[64];
    std::snprintf(metric, sizeof(metric), "rel_gap_T0_%g", report.t0_grid[i]);
    note("convergence", metric, report.rel_gap[i], true, false);
  }
  note("convergence", "decreasing", report.decreasing ? 1.0 : 0.0,
       report.decreasing);

  if (!out.empty()) {
    std::string text = "check,metric,value,pass\n";
    for (const auto& row : csv_rows) text += row;
    aoisim::report::write_file(text, out);
  }
  std::printf("diagnostics: %s\n", all_ok ? "PASS" : "FAIL");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monte Carlo simulator and analysis toolkit for age of information "
      "under energy harvesting over an erasure channel"};
  app.require_subcommand(1);

  ExperimentConfig config;
  int grid_points = 0;
  OutputOptions run_out;
  std::string dump_records, dump_config;

  CLI::App* run = app.add_subcommand("run", "Run a single experiment");
  run->set_config("--config", "", "Flat key=value config file");
  run->add_option("--policy", config.policy, "bu | bu-er | greedy");
  run->add_option("--p", config.p, "Per-attempt success probability");
  run->add_option("--T", config.horizon, "Horizon");
  run->add_option("--T0", config.t0, "BU-ER renewal clock");
  run->add_option("--paths", config.paths, "Sample paths");
  run->add_option("--seed", config.seed, "RNG seed");
  run->add_option("--E0", config.initial_energy, "Initial battery units");
  run->add_option("--workers", config.workers, "Worker threads (0 = auto)")
      ->envname("AOISIM_WORKERS");
  run->add_option("--grid-points", grid_points,
                  "Log-spaced horizons per path (0 = final horizon only)");
  add_output_options(run, run_out);
  run->add_option("--dump-records", dump_records,
                  "Write per-path records (JSON lines) to this file");
  run->add_option("--dump-config", dump_config,
                  "Write the effective config (key=value) to this file");

  std::uint64_t fig_seed = 42;
  int fig_paths = 500, fig_workers = 0, fig_grid = 50;
  double fig_horizon = 5000.0, fig_t0 = 30.0;
  OutputOptions fig3_out, fig4_out;
  CLI::App* fig3 = app.add_subcommand(
      "fig3", "BU at p in {0.2, 0.6, 1.0} vs the lower bound");
  CLI::App* fig4 =
      app.add_subcommand("fig4", "BU vs BU-ER vs greedy at p = 0.6");
  for (CLI::App* cmd : {fig3, fig4}) {
    cmd->add_option("--seed", fig_seed, "RNG seed");
    cmd->add_option("--paths", fig_paths, "Sample paths");
    cmd->add_option("--T", fig_horizon, "Horizon");
    cmd->add_option("--workers", fig_workers, "Worker threads (0 = auto)")
        ->envname("AOISIM_WORKERS");
    cmd->add_option("--grid-points", fig_grid, "Horizons per curve");
  }
  fig4->add_option("--T0", fig_t0, "BU-ER renewal clock");
  add_output_options(fig3, fig3_out);
  add_output_options(fig4, fig4_out);

  std::uint64_t diag_seed = 42;
  int diag_workers = 0;
  std::size_t kappa_samples = 2000;
  std::uint64_t kappa_cap = 100000;
  std::string diag_out;
  CLI::App* diag =
      app.add_subcommand("diagnostics", "Structural and statistical checks");
  diag->add_option("--seed", diag_seed, "RNG seed");
  diag->add_option("--workers", diag_workers, "Worker threads (0 = auto)")
      ->envname("AOISIM_WORKERS");
  diag->add_option("--kappa-samples", kappa_samples, "Hitting-time samples");
  diag->add_option("--kappa-cap", kappa_cap, "Hitting-time censoring cap");
  diag->add_option("--out", diag_out, "Write check rows as CSV to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (grid_points > 0) {
        config.sample_grid = aoisim::log_grid(config.horizon, grid_points);
      }
      config.validate();
      if (!dump_records.empty()) config.retain_paths = true;
      if (!dump_config.empty()) {
        aoisim::report::write_file(
            config_key_values(config, grid_points, run_out), dump_config);
      }
      if (!dump_records.empty()) {
        auto agg = aoisim::run_experiment(config);
        aoisim::report::write_file(
            aoisim::report::records_to_jsonl(agg, config), dump_records);
        aoisim::report::Table table;
        double bound = aoisim::analysis::lower_bound(config.p);
        for (std::size_t i = 0; i < agg.grid.size(); ++i) {
          table.rows.push_back({agg.grid[i], config.p, config.policy,
                                agg.mean_aoi[i], agg.stderr_aoi[i], bound});
        }
        emit_table(table, run_out);
      } else {
        emit_table(aoisim::report::run_table(config), run_out);
      }
    } else if (fig3->parsed()) {
      emit_table(aoisim::report::preset_fig3(fig_seed, fig_workers, fig_paths,
                                             fig_horizon, fig_grid),
                 fig3_out);
    } else if (fig4->parsed()) {
      emit_table(aoisim::report::preset_fig4(fig_seed, fig_workers, fig_paths,
                                             fig_horizon, fig_t0, fig_grid),
                 fig4_out);
    } else if (diag->parsed()) {
      return run_diagnostics(diag_seed, diag_workers, kappa_samples, kappa_cap,
                             diag_out);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
