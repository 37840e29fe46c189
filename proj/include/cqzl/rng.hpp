#pragma once

#include <cmath>
#include <cstdint>

namespace cqzl {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent stream key from a user seed and a salt (attempt
// counters, row indices, subsystem tags). All randomness in the library
// flows from one seed through this derivation.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt ^ 0x517cc1b727220a95ULL));
}

// SplitMix64 in counter mode: word(i) is a pure function of (key, i), so
// draws are order-independent and reproducible across platforms.
struct Stream {
  std::uint64_t key = 0;

  std::uint64_t word(std::uint64_t counter) const {
    return splitmix64(key ^ splitmix64(counter + 0x2545f4914f6cdd1dULL));
  }

  // uniform in [0, 1), 53-bit resolution
  double u01(std::uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  // Exponential(1); u01 < 1 keeps the log argument positive
  double exponential(std::uint64_t counter) const { return -std::log1p(-u01(counter)); }

  // standard normal via Box-Muller; consumes counters 2k and 2k+1
  double gaussian(std::uint64_t pair_index) const {
    double u1 = 1.0 - u01(2 * pair_index);      // (0, 1]
    double u2 = u01(2 * pair_index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }
};

}  // namespace cqzl
