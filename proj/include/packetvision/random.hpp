#pragma once

#include <cstdint>

namespace packetvision {

/// SplitMix64 (Steele, Lea & Flood 2014). The state advances by the 64-bit
/// golden-ratio increment and each output is the fixed finalizer below, so
/// the sequence for a given seed is identical on every platform. Do not
/// change this algorithm: generated datasets depend on it bit for bit.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += kIncrement;
    return finalize(state_);
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double next_double() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by modulo with rejection; bound must be
  /// non-zero.
  std::uint64_t next_below(std::uint64_t bound) noexcept;

  constexpr std::uint64_t state() const noexcept { return state_; }

  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Order-sensitive 64-bit combination of two values.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return SplitMix64::finalize(SplitMix64::finalize(a + SplitMix64::kIncrement) ^
                              (b + 2 * SplitMix64::kIncrement));
}

/// Per-image seed from the dataset seed and the sample's position.
constexpr std::uint64_t derive_image_seed(std::uint64_t global_seed,
                                          std::uint64_t source_index,
                                          std::uint64_t packet_index) noexcept {
  return mix_seed(mix_seed(global_seed, source_index), packet_index);
}

}  // namespace packetvision
