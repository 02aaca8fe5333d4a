#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aoisim/core.hpp"
#include "aoisim/policy.hpp"
#include "aoisim/rng.hpp"

namespace aoisim {

struct ExperimentConfig {
  double p = 0.6;             // per-attempt success probability, (0, 1]
  double horizon = 5000.0;    // T
  int paths = 500;
  std::uint64_t seed = 42;
  std::string policy = "bu";  // "bu" | "bu-er" | "greedy"
  double t0 = 30.0;           // BU-ER renewal clock
  long initial_energy = 2;    // E0
  std::vector<double> sample_grid;  // intermediate horizons; empty -> {T}
  int workers = 0;            // 0 -> hardware concurrency
  bool retain_paths = false;  // keep full logs and the energy trace per path

  void validate() const;
  std::vector<double> effective_grid() const;
};

// 50 log-spaced horizons ending at T.
std::vector<double> log_grid(double horizon, int points = 50);

struct SimRecord {
  std::vector<double> aoi_per_grid;  // R(g)/g per grid point

  long attempts = 0;     // M(T)
  long deliveries = 0;   // N(T)
  long final_battery = 0;
  long max_battery = 0;

  // BU-ER renewal statistics (one entry per completed renewal).
  std::vector<double> t1_samples;
  std::vector<double> t2_samples;
  std::vector<double> tail_samples;  // T1 - S_{N(T1)}, renewal-local
  std::vector<long> renewal_deliveries;

  // Populated only when retain_paths is set.
  std::vector<double> attempt_epochs;
  std::vector<long> attempt_battery_before;
  std::vector<double> delivery_epochs;
  std::vector<double> arrival_times;
};

// Monotone arrival instants; +infinity once exhausted.
class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  virtual double next() = 0;
};

// Channel coin u in [0,1) per epoch index; success iff u < p.
class CoinSource {
 public:
  virtual ~CoinSource() = default;
  virtual double unit_at(std::uint64_t index) const = 0;
};

class StreamArrivalSource final : public ArrivalSource {
 public:
  explicit StreamArrivalSource(rng::Stream stream, double rate = 1.0)
      : stream_(stream), rate_(rate) {}
  double next() override {
    clock_ += stream_.exponential(rate_);
    return clock_;
  }

 private:
  rng::Stream stream_;
  double rate_;
  double clock_ = 0.0;
};

class StreamCoinSource final : public CoinSource {
 public:
  explicit StreamCoinSource(rng::Stream stream) : stream_(stream) {}
  double unit_at(std::uint64_t index) const override {
    return stream_.unit_at(index);
  }

 private:
  rng::Stream stream_;
};

// Core event loop: two event sources (next arrival, next scheduled epoch),
// arrivals at exactly an epoch count as arriving before it.
SimRecord simulate_path(const ExperimentConfig& config, Policy& policy,
                        ArrivalSource& arrivals, const CoinSource& coins);

// Seeded path: energy and channel substreams derived from (seed, path_index).
SimRecord run_path(const ExperimentConfig& config, std::uint64_t path_index);

struct Aggregate {
  std::vector<double> grid;
  std::vector<double> mean_aoi;    // mean over paths of R(g)/g
  std::vector<double> stderr_aoi;  // sample stdev / sqrt(paths)
  std::vector<SimRecord> records;  // per path, in path order
};

// Runs config.paths paths, possibly in parallel; output is a pure function of
// the config (aggregation is pairwise over path order).
Aggregate run_experiment(const ExperimentConfig& config);

// Numerically stable order-insensitive reduction helpers.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);
double sample_stderr(std::span<const double> values, double mean);

}  // namespace aoisim
