#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rvk {

// Counter-keyed pseudo-random stream. The sequence produced for a given
// (seed, hi, lo) key does not depend on any other key, so independent work
// items can draw their own randomness in any execution order and still see
// the exact numbers a sequential run would have drawn.
//
// The stream is a splitmix64 walk whose starting state is a mixed digest of
// the key words.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed, std::uint64_t hi = 0,
                    std::uint64_t lo = 0) {
    std::uint64_t k = mix(hi + kGamma);
    k = mix(k ^ lo);
    state_ = mix(k ^ seed);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += kGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n), n >= 1. Fixed-point multiply keeps the
  // mapping identical on every platform with 128-bit arithmetic.
  std::uint32_t next_below(std::uint32_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint32_t>(wide >> 64);
  }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  // Uniform double in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + next_unit() * (hi - lo);
  }

  // Standard normal draw, one value per call (Box-Muller, cosine branch).
  double next_gaussian() {
    const double u1 =
        static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
};

}  // namespace rvk
