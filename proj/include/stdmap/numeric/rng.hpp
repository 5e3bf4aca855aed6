#pragma once

// Counter-based random streams.  Every sample index gets its own stream keyed
// by (seed, index), so the numbers a sample sees do not depend on which thread
// processes it or in what order.

#include <cstdint>

namespace stdmap::numeric {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : key_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next_u64() {
    // output = mix(key + counter * golden); a pure function of (key, counter)
    return splitmix64(key_ + (counter_++) * 0xD1342543DE82EF95ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace stdmap::numeric
