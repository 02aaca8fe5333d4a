#include "aoisim/policy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoisim {

namespace {

double next_integer_after(double now) { return std::floor(now) + 1.0; }

std::uint64_t epoch_coin_index(double epoch) {
  return static_cast<std::uint64_t>(std::llround(epoch));
}

bool is_integer_instant(double t) { return t == std::floor(t); }

}  // namespace

PolicyDecision BuPolicy::next_epoch(const PolicyView& view) {
  return {next_integer_after(view.now), false};
}

EpochAction BuPolicy::on_epoch(const PolicyView& view) {
  EpochAction action;
  action.attempt = view.battery >= 1;
  action.coin_index = epoch_coin_index(view.now);
  return action;
}

BuErPolicy::BuErPolicy(double t0) : t0_(t0) {
  if (t0 <= 0.0) throw std::invalid_argument("T0 must be > 0");
  marks_.renewal_starts.push_back(0.0);
}

PolicyDecision BuErPolicy::next_epoch(const PolicyView& view) {
  double next_int = next_integer_after(view.now);
  if (stage_ == Stage::kStage1) {
    double deadline = renewal_start_ + t0_;
    // Depletion fires between scheduled epochs; when it lands exactly on an
    // epoch, the epoch is processed first (on_epoch handles both).
    if (deadline > view.now && deadline < next_int) return {deadline, false};
  }
  return {next_int, false};
}

EpochAction BuErPolicy::on_epoch(const PolicyView& view) {
  EpochAction action;
  if (stage_ == Stage::kStage1) {
    double deadline = renewal_start_ + t0_;
    if (!is_integer_instant(view.now)) {
      // Pure depletion instant.
      action.battery_override = 0;
      stage_ = Stage::kStage2;
      marks_.stage2_starts.push_back(view.now);
      return action;
    }
    // Scheduled epoch; stage 1 never has an outage (battery entering a stage-1
    // slot is >= 1, plus nonnegative arrivals).
    if (view.battery < 1) {
      throw CausalityError("stage-1 epoch reached with empty battery");
    }
    action.attempt = true;
    action.coin_index = epoch_coin_index(view.now);
    long after = view.battery - 1;
    if (after == 0) {
      stage_ = Stage::kStage2;
      marks_.stage2_starts.push_back(view.now);
    } else if (view.now >= deadline) {
      action.battery_override = 0;
      stage_ = Stage::kStage2;
      marks_.stage2_starts.push_back(view.now);
    }
    return action;
  }

  // Stage 2: best-effort attempts continue; a post-attempt level of 1 or more
  // ends the stage, cut back to exactly one unit.
  if (view.battery >= 1) {
    action.attempt = true;
    action.coin_index = epoch_coin_index(view.now);
    if (view.battery - 1 >= 1) {
      action.battery_override = 1;
      stage_ = Stage::kStage1;
      renewal_start_ = view.now;
      marks_.stage2_ends.push_back(view.now);
      marks_.renewal_starts.push_back(view.now);
    }
  }
  return action;
}

PolicyDecision GreedyPolicy::next_epoch(const PolicyView& view) {
  if (view.battery >= 1) {
    return {std::nextafter(view.now, std::numeric_limits<double>::infinity()),
            false};
  }
  PolicyDecision d;
  d.at_next_arrival = true;
  return d;
}

EpochAction GreedyPolicy::on_epoch(const PolicyView& view) {
  EpochAction action;
  if (view.battery >= 1) {
    action.attempt = true;
    action.coin_index = attempts_made_++;
  }
  return action;
}

std::unique_ptr<Policy> make_policy(const std::string& name, double t0) {
  if (name == "bu") return std::make_unique<BuPolicy>();
  if (name == "bu-er") return std::make_unique<BuErPolicy>(t0);
  if (name == "greedy") return std::make_unique<GreedyPolicy>();
  throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace aoisim
