#pragma once

#include <cstdint>

namespace commons {

/// Counter-based generator: every draw is a pure function of the key, so
/// replays and parallel runs see identical streams regardless of call order.
/// Mix is splitmix64 over the combined key.
struct CounterRng {
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// Keyed draw: (seed, tick, actor tag, counter) -> u64.
  static std::uint64_t draw(std::uint64_t seed, std::uint64_t tick, std::uint64_t actor_tag,
                            std::uint64_t counter = 0) {
    std::uint64_t h = mix(seed);
    h = mix(h ^ tick);
    h = mix(h ^ actor_tag);
    h = mix(h ^ counter);
    return h;
  }

  /// Uniform draw in [0, bound); bound must be nonzero.
  static std::uint64_t bounded(std::uint64_t key, std::uint64_t bound) { return key % bound; }
};

}  // namespace commons
