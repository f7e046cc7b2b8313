#ifndef RBO_RANDOM_HPP
#define RBO_RANDOM_HPP

#include <cstdint>
#include <string_view>

namespace rbo {

/// SplitMix64 (Steele, Lea, Flood 2014). The state advances by a fixed odd
/// increment and each output is a mix of the state, so the j-th output is
/// available directly without generating the ones before it.
class SplitMix64 {
 public:
  static constexpr std::string_view kName = "splitmix64";
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Output number j (0-based) of a generator seeded with `seed`.
  static constexpr std::uint64_t nth(std::uint64_t seed, std::uint64_t j) {
    return mix(seed + (j + 1) * kGamma);
  }

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  static constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
      const std::uint64_t v = next();
      if (v < limit) return v % bound;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace rbo

#endif  // RBO_RANDOM_HPP
