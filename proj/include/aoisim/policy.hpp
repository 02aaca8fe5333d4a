#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aoisim/core.hpp"

namespace aoisim {

// Everything a policy is allowed to see. Deliberately contains no delivery
// log, no channel outcomes and no success probability: the information
// constraint is structural, not a convention.
struct PolicyView {
  double now = 0.0;
  long battery = 0;
  const AttemptLog* own_attempt_history = nullptr;
  double harvesting_rate = 1.0;
};

struct PolicyDecision {
  double next_epoch = 0.0;
  // When set, the engine targets the next energy arrival instead of
  // next_epoch (greedy is event-driven).
  bool at_next_arrival = false;
};

// What happens at the decided instant. battery_override is applied after the
// attempt (BU-ER's energy removal); coin_index keys the channel coin so that
// coupled policies sharing a schedule see identical channel states.
struct EpochAction {
  bool attempt = false;
  std::optional<long> battery_override;
  std::uint64_t coin_index = 0;
};

// Stage boundaries recorded by renewal policies, harvested by the engine.
struct RenewalMarks {
  std::vector<double> renewal_starts;  // starts with 0
  std::vector<double> stage2_starts;
  std::vector<double> stage2_ends;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyDecision next_epoch(const PolicyView& view) = 0;
  virtual EpochAction on_epoch(const PolicyView& view) = 0;
  virtual const RenewalMarks* renewal_marks() const { return nullptr; }
};

// Best-effort uniform: attempt at every integer instant when the battery
// permits, stay silent otherwise.
class BuPolicy final : public Policy {
 public:
  PolicyDecision next_epoch(const PolicyView& view) override;
  EpochAction on_epoch(const PolicyView& view) override;
};

// Best-effort uniform with energy removal. Stage 1 runs BU until the
// post-attempt battery hits zero or the renewal-local clock reaches T0 (the
// battery is then depleted); stage 2 keeps running best-effort attempts until
// the post-attempt battery reaches 1 or more, at which point it is cut to
// exactly 1 and a fresh renewal begins.
class BuErPolicy final : public Policy {
 public:
  explicit BuErPolicy(double t0);

  PolicyDecision next_epoch(const PolicyView& view) override;
  EpochAction on_epoch(const PolicyView& view) override;
  const RenewalMarks* renewal_marks() const override { return &marks_; }

 private:
  enum class Stage { kStage1, kStage2 };

  double t0_;
  Stage stage_ = Stage::kStage1;
  double renewal_start_ = 0.0;
  RenewalMarks marks_;
};

// Attempt the instant any energy is on hand: initial units are spent
// immediately after t=0 (serialized at distinct instants), every harvested
// unit is spent at its arrival.
class GreedyPolicy final : public Policy {
 public:
  PolicyDecision next_epoch(const PolicyView& view) override;
  EpochAction on_epoch(const PolicyView& view) override;

 private:
  std::uint64_t attempts_made_ = 0;
};

// name is one of "bu", "bu-er", "greedy".
std::unique_ptr<Policy> make_policy(const std::string& name, double t0 = 30.0);

}  // namespace aoisim
