#pragma once

#include <cstdint>
#include <string_view>

#include "lendsim/fixed_dec.hpp"

namespace lendsim {

constexpr uint64_t fnv1a64(std::string_view text) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Counter-based generator: output depends only on (seed, stream, counter),
// never on call order, so any evaluation order replays identically.
// The mixer is the splitmix64 finalizer.
class CounterRng {
public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t at(uint64_t stream, uint64_t counter) const {
    return mix(mix(mix(seed_) ^ stream) ^ counter);
  }

  // uniform draw from {-1, -0.999999, ..., 0.999999, 1} (a 1e-6 grid), so
  // the mapped value is exact in fixed point on every platform
  FixedDec symmetric_unit(uint64_t stream, uint64_t counter) const {
    constexpr uint64_t kGrid = 2000001;  // 2e6 + 1 lattice points
    int64_t offset = static_cast<int64_t>(at(stream, counter) % kGrid) - 1000000;
    return FixedDec::from_raw(int256(offset) * 1000000000000LL);
  }

  uint64_t seed() const { return seed_; }

private:
  static uint64_t mix(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  uint64_t seed_;
};

}  // namespace lendsim
