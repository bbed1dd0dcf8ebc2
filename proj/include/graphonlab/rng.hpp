#pragma once

#include <cstdint>

namespace graphonlab {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so parallel row substreams reproduce the serial
/// sequence exactly.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  [[nodiscard]] std::uint64_t at(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t next() { return at(counter_++); }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return to_unit(next()); }
  [[nodiscard]] double uniform_at(std::uint64_t counter) const {
    return to_unit(at(counter));
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift; the bias is below 2^-64 * bound.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace graphonlab
