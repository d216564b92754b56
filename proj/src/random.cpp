#include "packetvision/random.hpp"

namespace packetvision {

std::uint64_t SplitMix64::next_below(std::uint64_t bound) noexcept {
  // Reject the 2^64 mod bound lowest outputs so the modulo is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace packetvision
