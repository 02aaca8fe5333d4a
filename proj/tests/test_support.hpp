#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "aoisim/engine.hpp"

namespace aoisim::test {

class FixedArrivals final : public ArrivalSource {
 public:
  explicit FixedArrivals(std::vector<double> times) : times_(std::move(times)) {}
  double next() override {
    if (index_ < times_.size()) return times_[index_++];
    return std::numeric_limits<double>::infinity();
  }

 private:
  std::vector<double> times_;
  std::size_t index_ = 0;
};

// Constant coin value; 0.0 makes every attempt succeed, 1.0 - eps fail.
class FixedCoins final : public CoinSource {
 public:
  explicit FixedCoins(double u) : u_(u) {}
  double unit_at(std::uint64_t) const override { return u_; }

 private:
  double u_;
};

// Battery level right before each integer epoch 1..floor(T), replayed from a
// trace and the set of attempted integer epochs (arrival at an epoch counts
// as arriving before it).
inline std::vector<long> replay_integer_battery(
    const std::vector<double>& arrivals, const std::vector<double>& attempts,
    long initial, double horizon) {
  std::vector<long> before;
  long level = initial;
  std::size_t ai = 0, ti = 0;
  for (double epoch = 1.0; epoch <= horizon; epoch += 1.0) {
    while (ai < arrivals.size() && arrivals[ai] <= epoch) {
      ++level;
      ++ai;
    }
    before.push_back(level);
    if (ti < attempts.size() && attempts[ti] == epoch) {
      --level;
      ++ti;
    }
  }
  return before;
}

}  // namespace aoisim::test
