#include "aoisim/core.hpp"

#include <algorithm>
#include <cmath>

namespace aoisim {

void EnergyTrace::validate() const {
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
  double prev = 0.0;
  for (double t : arrival_times) {
    if (!(t > prev)) {
      throw std::invalid_argument("arrival times must be strictly increasing and > 0");
    }
    if (t > horizon) throw std::invalid_argument("arrival beyond horizon");
    prev = t;
  }
}

EnergyTrace make_poisson_trace(rng::Stream& stream, double horizon,
                               double rate) {
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
  if (rate <= 0.0) throw std::invalid_argument("rate must be > 0");
  EnergyTrace trace;
  trace.horizon = horizon;
  double t = stream.exponential(rate);
  while (t <= horizon) {
    trace.arrival_times.push_back(t);
    t += stream.exponential(rate);
  }
  return trace;
}

BatteryState energy_step(BatteryState battery, long arrivals_in_interval,
                         bool attempt) {
  if (arrivals_in_interval < 0) {
    throw std::invalid_argument("arrival count must be >= 0");
  }
  if (attempt && battery.level() < 1) {
    throw CausalityError("update attempt with empty battery");
  }
  return BatteryState(battery.level() + arrivals_in_interval -
                      (attempt ? 1 : 0));
}

void AttemptLog::push(double epoch, long level_before) {
  if (!epochs.empty() && epoch <= epochs.back()) {
    throw std::invalid_argument("attempt epochs must be strictly increasing");
  }
  if (level_before < 1) {
    throw CausalityError("attempt recorded with battery below 1");
  }
  epochs.push_back(epoch);
  battery_before.push_back(level_before);
}

std::size_t AttemptLog::count_until(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(epochs.begin(), epochs.end(), t) - epochs.begin());
}

void DeliveryLog::push(double epoch) {
  if (!epochs.empty() && epoch <= epochs.back()) {
    throw std::invalid_argument("delivery epochs must be strictly increasing");
  }
  epochs.push_back(epoch);
}

std::size_t DeliveryLog::count_until(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(epochs.begin(), epochs.end(), t) - epochs.begin());
}

double DeliveryLog::last_at_or_before(double t) const {
  std::size_t n = count_until(t);
  return n == 0 ? 0.0 : epochs[n - 1];
}

void AoiAccumulator::record_delivery(double s) {
  if (!(s > last_delivery_)) {
    throw std::invalid_argument("delivery instants must be increasing");
  }
  double gap = s - last_delivery_;
  area_ += gap * gap / 2.0;
  last_delivery_ = s;
}

double AoiAccumulator::finalize(double horizon) const {
  if (horizon < last_delivery_) {
    throw std::invalid_argument("horizon precedes last delivery");
  }
  double tail = horizon - last_delivery_;
  return area_ + tail * tail / 2.0;
}

double aoi_brute_force(const DeliveryLog& deliveries, double horizon,
                       double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
  double sum = 0.0;
  std::size_t idx = 0;  // deliveries consumed so far
  double last = 0.0;
  const auto& s = deliveries.epochs;
  for (double t = dt / 2.0; t < horizon; t += dt) {
    while (idx < s.size() && s[idx] <= t) last = s[idx++];
    sum += (t - last) * dt;
  }
  return sum;
}

}  // namespace aoisim
