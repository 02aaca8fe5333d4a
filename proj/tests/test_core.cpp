#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aoisim/core.hpp"
#include "aoisim/rng.hpp"

using namespace aoisim;

TEST_CASE("energy_step applies the queue recurrence") {
  CHECK(energy_step(BatteryState(2), 0, true).level() == 1);
  CHECK(energy_step(BatteryState(1), 3, true).level() == 3);
  CHECK(energy_step(BatteryState(5), 2, false).level() == 7);
  CHECK_THROWS_AS(energy_step(BatteryState(0), 0, true), CausalityError);
  CHECK_THROWS_AS(energy_step(BatteryState(1), -1, false), std::invalid_argument);
}

TEST_CASE("AoiAccumulator tracks sawtooth areas") {
  AoiAccumulator acc;
  acc.record_delivery(1.0);
  CHECK(acc.last_delivery() == 1.0);
  CHECK(acc.accumulated_area() == doctest::Approx(0.5));
  acc.record_delivery(3.0);
  CHECK(acc.accumulated_area() == doctest::Approx(2.5));
  CHECK_THROWS_AS(acc.record_delivery(3.0), std::invalid_argument);
  CHECK_THROWS_AS(acc.record_delivery(2.0), std::invalid_argument);

  AoiAccumulator half;
  half.record_delivery(0.5);
  CHECK(half.accumulated_area() == doctest::Approx(0.125));
}

TEST_CASE("finalize adds the tail term") {
  AoiAccumulator acc;
  for (double s : {1.0, 2.0, 3.0, 4.0, 5.0}) acc.record_delivery(s);
  CHECK(acc.finalize(5.0) == doctest::Approx(2.5));

  AoiAccumulator empty;
  CHECK(empty.finalize(10.0) == doctest::Approx(50.0));

  AoiAccumulator one;
  one.record_delivery(2.0);
  CHECK(one.finalize(3.0) == doctest::Approx(2.5));
  CHECK_THROWS_AS(one.finalize(1.0), std::invalid_argument);
}

TEST_CASE("brute-force age integration agrees on known sets") {
  DeliveryLog log;
  for (double s : {1.0, 2.0, 3.0, 4.0, 5.0}) log.push(s);
  CHECK(std::fabs(aoi_brute_force(log, 5.0, 1e-4) - 2.5) <= 1e-3);

  DeliveryLog none;
  CHECK(std::fabs(aoi_brute_force(none, 2.0, 1e-4) - 2.0) <= 1e-3);

  DeliveryLog single;
  single.push(2.0);
  CHECK(std::fabs(aoi_brute_force(single, 3.0, 1e-4) - 2.5) <= 1e-3);
  CHECK_THROWS_AS(aoi_brute_force(single, 3.0, 0.0), std::invalid_argument);
}

TEST_CASE("closed form matches the grid oracle on random delivery sets") {
  rng::Stream stream(rng::derive_stream(7, 0, rng::StreamTag::kScratch));
  const double dt = 1e-3;
  for (int trial = 0; trial < 25; ++trial) {
    double horizon = 1.0 + 29.0 * stream.next_unit();
    DeliveryLog log;
    AoiAccumulator acc;
    double t = 0.0;
    while (true) {
      t += 0.05 + stream.exponential(0.7);
      if (t > horizon) break;
      log.push(t);
      acc.record_delivery(t);
    }
    double exact = acc.finalize(horizon);
    double approx = aoi_brute_force(log, horizon, dt);
    CHECK(std::fabs(exact - approx) <= 10.0 * dt * horizon);
  }
}

TEST_CASE("poisson traces satisfy the type invariants") {
  rng::Stream stream(rng::derive_stream(11, 3, rng::StreamTag::kEnergy));
  EnergyTrace trace = make_poisson_trace(stream, 5000.0);
  trace.validate();
  REQUIRE(!trace.arrival_times.empty());
  CHECK(trace.arrival_times.front() > 0.0);
  CHECK(trace.arrival_times.back() <= 5000.0);
  CHECK(std::is_sorted(trace.arrival_times.begin(), trace.arrival_times.end()));
  // rate-1 arrivals: count concentrates near the horizon
  double n = static_cast<double>(trace.arrival_times.size());
  CHECK(std::fabs(n - 5000.0) < 5.0 * std::sqrt(5000.0));

  EnergyTrace bad{{0.5, 0.5}, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  EnergyTrace beyond{{2.0}, 1.0};
  CHECK_THROWS_AS(beyond.validate(), std::invalid_argument);
}

TEST_CASE("attempt and delivery logs count prefixes") {
  AttemptLog attempts;
  attempts.push(1.0, 2);
  attempts.push(2.0, 1);
  attempts.push(4.0, 3);
  CHECK(attempts.count_until(3.0) == 2);
  CHECK(attempts.count_until(4.0) == 3);
  CHECK_THROWS_AS(attempts.push(4.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(attempts.push(5.0, 0), CausalityError);

  DeliveryLog deliveries;
  deliveries.push(2.0);
  deliveries.push(5.0);
  CHECK(deliveries.count_until(1.0) == 0);
  CHECK(deliveries.last_at_or_before(1.0) == 0.0);
  CHECK(deliveries.last_at_or_before(5.0) == 5.0);
  CHECK_THROWS_AS(deliveries.push(5.0), std::invalid_argument);
}
