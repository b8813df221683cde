#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace abram {

// Counter-based pseudo-random stream. Each draw is a stateless mix of
// (seed, stream id, counter), so a stream is fully determined by its key and
// the number of draws taken from it -- independent of which thread runs it
// and of any other stream. This is what makes parallel Monte Carlo runs
// reproducible across thread counts.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(mix(mix(seed ^ 0x2545F4914F6CDD1DULL) + stream_id)), stream_id_(stream_id) {}

  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;  // golden-ratio increment (splitmix64)
    return mix(key_ ^ counter_);
  }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform over {0, ..., n-1} by rejection (no modulo bias).
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t draw = next_u64();
    while (draw >= limit) draw = next_u64();
    return draw % n;
  }

  // One standard normal via Box-Muller. Consumes two uniforms per call; the
  // second Box-Muller value is discarded to keep the draw count per call
  // fixed (simpler reproducibility reasoning than caching).
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  void normal_fill(std::span<double> out) {
    for (double& x : out) x = normal();
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
};

}  // namespace abram
