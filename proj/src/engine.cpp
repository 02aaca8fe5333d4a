#include "aoisim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace aoisim {

void ExperimentConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0, 1]");
  if (!(horizon > 0.0)) throw std::invalid_argument("T must be > 0");
  if (paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (initial_energy < 1) throw std::invalid_argument("E0 must be >= 1");
  if (policy == "bu-er") {
    if (t0 <= 0.0) throw std::invalid_argument("T0 must be > 0");
    if (initial_energy != 2) {
      throw std::invalid_argument("bu-er requires E0 = 2");
    }
  } else if (policy != "bu" && policy != "greedy") {
    throw std::invalid_argument("unknown policy: " + policy);
  }
  double prev = 0.0;
  for (double g : sample_grid) {
    if (!(g > prev)) throw std::invalid_argument("sample_grid must be increasing and > 0");
    if (g > horizon) throw std::invalid_argument("sample_grid point beyond T");
    prev = g;
  }
}

std::vector<double> ExperimentConfig::effective_grid() const {
  if (!sample_grid.empty()) return sample_grid;
  return {horizon};
}

std::vector<double> log_grid(double horizon, int points) {
  if (points < 1 || horizon <= 0.0) throw std::invalid_argument("bad grid request");
  if (points == 1) return {horizon};
  double lo = std::min(10.0, horizon / 10.0);
  double llo = std::log(lo), lhi = std::log(horizon);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
  }
  grid.back() = horizon;
  return grid;
}

namespace {

std::unique_ptr<Policy> policy_for(const ExperimentConfig& config) {
  return make_policy(config.policy, config.t0);
}

// R(g)/g per grid point from the delivery epochs, exact sawtooth areas.
std::vector<double> grid_aoi(const std::vector<double>& deliveries,
                             const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  double area = 0.0, last = 0.0;
  std::size_t di = 0;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double g = grid[gi];
    while (di < deliveries.size() && deliveries[di] <= g) {
      double gap = deliveries[di] - last;
      area += gap * gap / 2.0;
      last = deliveries[di];
      ++di;
    }
    double tail = g - last;
    out[gi] = (area + tail * tail / 2.0) / g;
  }
  return out;
}

void harvest_renewal_stats(const RenewalMarks& marks,
                           const std::vector<double>& deliveries,
                           SimRecord& record) {
  std::size_t complete = marks.stage2_ends.size();
  for (std::size_t k = 0; k < complete; ++k) {
    double start = marks.renewal_starts[k];
    double s2 = marks.stage2_starts[k];
    double end = marks.stage2_ends[k];
    record.t1_samples.push_back(s2 - start);
    record.t2_samples.push_back(end - s2);
    // Last delivery within the renewal's stage 1, measured from the renewal
    // start; none -> the whole stage is tail.
    auto lo = std::upper_bound(deliveries.begin(), deliveries.end(), start);
    auto hi = std::upper_bound(deliveries.begin(), deliveries.end(), s2);
    double last = (hi == lo) ? start : *(hi - 1);
    record.tail_samples.push_back(s2 - last);
    auto renewal_end = std::upper_bound(deliveries.begin(), deliveries.end(), end);
    record.renewal_deliveries.push_back(static_cast<long>(renewal_end - lo));
  }
}

}  // namespace

SimRecord simulate_path(const ExperimentConfig& config, Policy& policy,
                        ArrivalSource& arrivals, const CoinSource& coins) {
  const double horizon = config.horizon;
  BatteryState battery(config.initial_energy);
  AttemptLog attempts;
  std::vector<double> deliveries;
  std::vector<double> trace;
  long max_battery = battery.level();

  double now = 0.0;
  double next_arrival = arrivals.next();

  while (true) {
    PolicyView view{now, battery.level(), &attempts, 1.0};
    PolicyDecision decision = policy.next_epoch(view);

    double target;
    if (decision.at_next_arrival) {
      if (next_arrival > horizon) break;
      target = next_arrival;
    } else {
      if (!(decision.next_epoch > now)) {
        throw std::logic_error("policy scheduled a non-future epoch");
      }
      if (decision.next_epoch > horizon) break;
      target = decision.next_epoch;
    }

    long arrived = 0;
    while (next_arrival <= target) {
      if (config.retain_paths) trace.push_back(next_arrival);
      ++arrived;
      next_arrival = arrivals.next();
    }
    battery = energy_step(battery, arrived, false);
    max_battery = std::max(max_battery, battery.level());
    now = target;

    PolicyView epoch_view{now, battery.level(), &attempts, 1.0};
    EpochAction action = policy.on_epoch(epoch_view);
    if (action.attempt) {
      if (battery.level() < 1) {
        throw CausalityError("policy '" + config.policy +
                             "' attempted with empty battery at t=" +
                             std::to_string(now));
      }
      attempts.push(now, battery.level());
      battery = energy_step(battery, 0, true);
      if (coins.unit_at(action.coin_index) < config.p) {
        deliveries.push_back(now);
      }
    }
    if (action.battery_override) {
      if (*action.battery_override > battery.level()) {
        throw std::logic_error("policy tried to add energy");
      }
      battery = BatteryState(*action.battery_override);
    }
  }

  if (config.retain_paths) {
    while (next_arrival <= horizon) {
      trace.push_back(next_arrival);
      next_arrival = arrivals.next();
    }
  }

  SimRecord record;
  record.aoi_per_grid = grid_aoi(deliveries, config.effective_grid());
  record.attempts = static_cast<long>(attempts.epochs.size());
  record.deliveries = static_cast<long>(deliveries.size());
  record.final_battery = battery.level();
  record.max_battery = max_battery;
  if (const RenewalMarks* marks = policy.renewal_marks()) {
    harvest_renewal_stats(*marks, deliveries, record);
  }
  if (config.retain_paths) {
    record.attempt_epochs = attempts.epochs;
    record.attempt_battery_before = attempts.battery_before;
    record.delivery_epochs = std::move(deliveries);
    record.arrival_times = std::move(trace);
  }
  return record;
}

SimRecord run_path(const ExperimentConfig& config, std::uint64_t path_index) {
  auto policy = policy_for(config);
  StreamArrivalSource arrivals{rng::Stream(
      rng::derive_stream(config.seed, path_index, rng::StreamTag::kEnergy))};
  StreamCoinSource coins{rng::Stream(
      rng::derive_stream(config.seed, path_index, rng::StreamTag::kChannel))};
  return simulate_path(config, *policy, arrivals, coins);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty set");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_stderr(std::span<const double> values, double mean) {
  std::size_t n = values.size();
  if (n < 2) return 0.0;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = values[i] - mean;
    sq[i] = d * d;
  }
  double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

Aggregate run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int n = config.paths;
  std::vector<SimRecord> records(n);

  int workers = config.workers > 0
                    ? config.workers
                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<int>(workers, n);

  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (int i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) {
        records[i] = run_path(config, static_cast<std::uint64_t>(i));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Aggregate agg;
  agg.grid = config.effective_grid();
  std::size_t g = agg.grid.size();
  agg.mean_aoi.resize(g);
  agg.stderr_aoi.resize(g);
  std::vector<double> column(n);
  for (std::size_t gi = 0; gi < g; ++gi) {
    for (int i = 0; i < n; ++i) column[i] = records[i].aoi_per_grid[gi];
    agg.mean_aoi[gi] = pairwise_mean(column);
    agg.stderr_aoi[gi] = sample_stderr(column, agg.mean_aoi[gi]);
  }
  agg.records = std::move(records);
  return agg;
}

}  // namespace aoisim
