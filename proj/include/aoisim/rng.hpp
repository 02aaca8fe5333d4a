#pragma once

#include <cmath>
#include <cstdint>

namespace aoisim::rng {

// SplitMix64 finalizer. Used both as the per-stream generator and for key
// derivation, so every draw is a pure function of (seed, path, tag, counter)
// and is bit-identical across platforms and thread schedules.
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamTag : std::uint64_t {
  kEnergy = 1,
  kChannel = 2,
  kWalk = 3,
  kScratch = 4,
};

struct StreamKey {
  std::uint64_t key = 0;
};

// Independent substream per (seed, path, purpose).
inline StreamKey derive_stream(std::uint64_t seed, std::uint64_t path_index,
                               StreamTag tag) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ mix64(path_index * kGolden + 0x5851f42d4c957f2dULL));
  k = mix64(k ^ mix64(static_cast<std::uint64_t>(tag) * kGolden));
  return StreamKey{k};
}

// Counter-based uniform stream. Supports both sequential draws and stateless
// indexed access; the latter is what lets two policies share one channel-coin
// sequence keyed by scheduled-epoch number.
class Stream {
 public:
  Stream() = default;
  explicit Stream(StreamKey k) : base_(k.key) {}

  std::uint64_t next_u64() { return value_at(counter_++); }

  // Uniform in [0, 1).
  double next_unit() { return to_unit(next_u64()); }

  double unit_at(std::uint64_t index) const { return to_unit(value_at(index)); }

  // Exponential with the given rate, via inversion.
  double exponential(double rate) {
    return -std::log1p(-next_unit()) / rate;
  }

  // Poisson(1) by Knuth's product-of-uniforms method.
  long poisson_unit() {
    static const double kThreshold = std::exp(-1.0);
    long k = 0;
    double prod = 1.0;
    do {
      prod *= next_unit();
      ++k;
    } while (prod > kThreshold);
    return k - 1;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t value_at(std::uint64_t index) const {
    return mix64(base_ + (index + 1) * kGolden);
  }
  static double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace aoisim::rng
