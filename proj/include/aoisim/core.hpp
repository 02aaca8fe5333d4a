#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "aoisim/rng.hpp"

namespace aoisim {

// Thrown when a policy tries to spend energy it does not have. The engine
// never produces this on a healthy path; seeing it means a policy bug.
class CausalityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One sample path of the harvesting process: strictly increasing instants in
// (0, horizon], unit-exponential gaps when generated by make_poisson_trace.
struct EnergyTrace {
  std::vector<double> arrival_times;
  double horizon = 0.0;

  void validate() const;
};

EnergyTrace make_poisson_trace(rng::Stream& stream, double horizon,
                               double rate = 1.0);

// Whole energy units; no cap (infinite battery).
class BatteryState {
 public:
  explicit BatteryState(long initial) : level_(initial) {
    if (initial < 0) throw std::invalid_argument("battery level must be >= 0");
  }
  long level() const { return level_; }

 private:
  long level_;
};

// new level = old + arrivals - (1 if attempt). Attempting at level 0 is an
// energy-causality violation.
BatteryState energy_step(BatteryState battery, long arrivals_in_interval,
                         bool attempt);

struct AttemptLog {
  std::vector<double> epochs;            // l_1 < l_2 < ...
  std::vector<long> battery_before;     // level right before each attempt

  void push(double epoch, long level_before);
  std::size_t count_until(double t) const;  // M(t)
};

struct DeliveryLog {
  std::vector<double> epochs;  // S_1 < S_2 < ..., S_0 = 0 implicit

  void push(double epoch);
  std::size_t count_until(double t) const;  // N(t)
  double last_at_or_before(double t) const;  // S_{N(t)}, 0 if none
};

// Exact sawtooth-area integrator: area accumulates (gap)^2/2 per delivery,
// finalize adds the (T - S_{N(T)})^2/2 tail.
class AoiAccumulator {
 public:
  void record_delivery(double s);
  double finalize(double horizon) const;

  double last_delivery() const { return last_delivery_; }
  double accumulated_area() const { return area_; }

 private:
  double last_delivery_ = 0.0;
  double area_ = 0.0;
};

// Independent oracle: midpoint Riemann sum of the instantaneous age on a grid
// of step dt. Converges to the closed-form accumulated age as dt -> 0.
double aoi_brute_force(const DeliveryLog& deliveries, double horizon,
                       double dt);

}  // namespace aoisim
