#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aoisim/analysis.hpp"
#include "aoisim/engine.hpp"
#include "test_support.hpp"

using namespace aoisim;
using test::FixedArrivals;
using test::FixedCoins;

TEST_CASE("config validation") {
  ExperimentConfig config;
  CHECK_NOTHROW(config.validate());
  ExperimentConfig bad = config;
  bad.p = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = config;
  bad.p = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = config;
  bad.policy = "nope";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = config;
  bad.policy = "bu-er";
  bad.initial_energy = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = config;
  bad.sample_grid = {10.0, 5.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("perfect channel BU delivers every integer slot") {
  ExperimentConfig config;
  config.policy = "bu";
  config.p = 1.0;
  config.horizon = 10.0;
  config.initial_energy = 100;  // no outage possible
  config.retain_paths = true;
  BuPolicy bu;
  FixedArrivals arrivals({});
  FixedCoins coins(0.0);
  SimRecord record = simulate_path(config, bu, arrivals, coins);
  REQUIRE(record.deliveries == 10);
  for (int i = 0; i < 10; ++i) CHECK(record.delivery_epochs[i] == i + 1.0);
  CHECK(record.aoi_per_grid.back() == doctest::Approx(0.5));
}

TEST_CASE("vanishing success probability leaves only the tail term") {
  ExperimentConfig config;
  config.policy = "bu";
  config.p = 1e-9;
  config.horizon = 100.0;
  config.seed = 3;
  SimRecord record = run_path(config, 0);
  CHECK(record.deliveries == 0);
  CHECK(record.aoi_per_grid.back() == doctest::Approx(50.0));
}

TEST_CASE("hand replay: BU with one arrival at 0.5") {
  ExperimentConfig config;
  config.policy = "bu";
  config.p = 0.6;  // irrelevant with forced-success coins
  config.horizon = 3.0;
  config.initial_energy = 2;
  config.retain_paths = true;
  BuPolicy bu;
  FixedArrivals arrivals({0.5});
  FixedCoins coins(0.0);
  SimRecord record = simulate_path(config, bu, arrivals, coins);
  CHECK(record.attempt_epochs == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(record.attempt_battery_before == std::vector<long>{3, 2, 1});
  CHECK(record.delivery_epochs == std::vector<double>{1.0, 2.0, 3.0});
  AoiAccumulator acc;
  for (double s : record.delivery_epochs) acc.record_delivery(s);
  CHECK(acc.finalize(3.0) == doctest::Approx(1.5));
}

TEST_CASE("derived streams are reproducible and distinct") {
  auto a = rng::derive_stream(42, 0, rng::StreamTag::kEnergy);
  auto b = rng::derive_stream(42, 0, rng::StreamTag::kEnergy);
  CHECK(a.key == b.key);
  rng::Stream s1(a), s2(b);
  for (int i = 0; i < 1000; ++i) REQUIRE(s1.next_u64() == s2.next_u64());

  CHECK(rng::derive_stream(42, 0, rng::StreamTag::kChannel).key != a.key);
  CHECK(rng::derive_stream(42, 1, rng::StreamTag::kEnergy).key != a.key);
  CHECK(rng::derive_stream(43, 0, rng::StreamTag::kEnergy).key != a.key);
}

TEST_CASE("energy and channel substreams look independent") {
  rng::Stream energy(rng::derive_stream(42, 0, rng::StreamTag::kEnergy));
  rng::Stream channel(rng::derive_stream(42, 0, rng::StreamTag::kChannel));
  const int n = 1'000'000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double x = energy.next_unit();
    double y = channel.next_unit();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  double mx = sx / n, my = sy / n;
  double cov = sxy / n - mx * my;
  double rho = cov / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
  CHECK(std::fabs(rho) < 0.01);
}

TEST_CASE("run_experiment is deterministic across worker counts") {
  ExperimentConfig config;
  config.policy = "bu-er";
  config.p = 0.6;
  config.horizon = 300.0;
  config.paths = 64;
  config.seed = 5;
  config.sample_grid = log_grid(300.0, 10);

  config.workers = 1;
  Aggregate serial = run_experiment(config);
  config.workers = 4;
  Aggregate parallel = run_experiment(config);
  config.workers = 4;
  Aggregate again = run_experiment(config);
  CHECK(serial.mean_aoi == parallel.mean_aoi);
  CHECK(serial.stderr_aoi == parallel.stderr_aoi);
  CHECK(parallel.mean_aoi == again.mean_aoi);
}

TEST_CASE("outage-free BU inter-delivery gaps are geometric") {
  // force the battery never to empty; attempts then happen every slot and
  // deliveries are a Bernoulli(p) thinning of the integers
  ExperimentConfig config;
  config.policy = "bu";
  config.p = 0.35;
  config.horizon = 20000.0;
  config.initial_energy = 1'000'000'000;
  config.seed = 8;
  config.retain_paths = true;

  std::vector<long> gaps;
  for (std::uint64_t path = 0; path < 2; ++path) {
    SimRecord record = run_path(config, path);
    CHECK(record.attempts == 20000);  // every slot
    double prev = 0.0;
    for (double s : record.delivery_epochs) {
      gaps.push_back(std::lround(s - prev));
      prev = s;
    }
  }
  double n = static_cast<double>(gaps.size());
  REQUIRE(n > 5000);
  for (long j = 1; j <= 10; ++j) {
    double expected = n * analysis::geometric_pmf(j, config.p);
    double observed = static_cast<double>(
        std::count(gaps.begin(), gaps.end(), j));
    double sigma = std::sqrt(expected * (1.0 - analysis::geometric_pmf(j, config.p)));
    CHECK(std::fabs(observed - expected) <= 3.5 * sigma);
  }
}

TEST_CASE("per-path conservation and rate invariants") {
  for (const char* policy : {"bu", "bu-er", "greedy"}) {
    ExperimentConfig config;
    config.policy = policy;
    config.p = 0.6;
    config.horizon = 2000.0;
    config.paths = 10;
    config.seed = 21;
    config.retain_paths = true;
    Aggregate agg = run_experiment(config);
    for (const SimRecord& record : agg.records) {
      long arrivals = static_cast<long>(record.arrival_times.size());
      CHECK(record.attempts <= config.initial_energy + arrivals);
      // Lemma-1 style rate cap, epsilon = 0.05
      CHECK(static_cast<double>(record.attempts) / config.horizon <= 1.05);
      CHECK(record.deliveries <= record.attempts);
    }
  }
}

TEST_CASE("recorded battery trajectory matches an energy_step replay") {
  ExperimentConfig config;
  config.policy = "bu";
  config.p = 0.6;
  config.horizon = 500.0;
  config.seed = 33;
  config.retain_paths = true;
  SimRecord record = run_path(config, 2);
  auto replayed = test::replay_integer_battery(
      record.arrival_times, record.attempt_epochs, config.initial_energy,
      config.horizon);
  std::size_t ai = 0;
  for (std::size_t epoch = 1; epoch <= 500; ++epoch) {
    long before = replayed[epoch - 1];
    if (ai < record.attempt_epochs.size() &&
        record.attempt_epochs[ai] == static_cast<double>(epoch)) {
      CHECK(record.attempt_battery_before[ai] == before);
      ++ai;
    } else {
      CHECK(before < 1);  // BU only skips infeasible epochs
    }
  }
  CHECK(ai == record.attempt_epochs.size());
}

TEST_CASE("grid aoi equals the closed form per grid point") {
  ExperimentConfig config;
  config.policy = "greedy";
  config.p = 0.5;
  config.horizon = 200.0;
  config.seed = 13;
  config.retain_paths = true;
  config.sample_grid = {10.0, 50.0, 200.0};
  SimRecord record = run_path(config, 1);
  for (std::size_t gi = 0; gi < config.sample_grid.size(); ++gi) {
    double g = config.sample_grid[gi];
    AoiAccumulator acc;
    for (double s : record.delivery_epochs) {
      if (s <= g) acc.record_delivery(s);
    }
    CHECK(record.aoi_per_grid[gi] == doctest::Approx(acc.finalize(g) / g));
  }
}

TEST_CASE("mean aoi respects the analytic floor") {
  for (const char* policy : {"bu", "bu-er", "greedy"}) {
    ExperimentConfig config;
    config.policy = policy;
    config.p = 0.6;
    config.horizon = 1500.0;
    config.paths = 60;
    config.seed = 77;
    Aggregate agg = run_experiment(config);
    double floor = analysis::lower_bound(config.p) - 2.0 * agg.stderr_aoi.back();
    CHECK(agg.mean_aoi.back() >= floor);
  }
}
