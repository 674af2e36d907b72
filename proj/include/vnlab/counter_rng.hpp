#pragma once

// Counter-based random numbers: draw i of stream `seed` depends only on
// (seed, i), so parallel draws reproduce exactly regardless of scheduling.

#include <cstdint>

namespace vnlab {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const { return splitmix64(key_ + splitmix64(counter)); }

  // Uniform in [0, n) by rejection, drawing from counters counter, counter+2^32, ...
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (std::uint64_t k = 0;; ++k) {
      const std::uint64_t v = bits(counter + (k << 32));
      if (v < limit) return v % n;
    }
  }

  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  int sign(std::uint64_t counter) const { return (bits(counter) >> 63) ? -1 : 1; }

 private:
  std::uint64_t key_;
};

}  // namespace vnlab
