#ifndef WEALTHLAB_CORE_RNG_HPP
#define WEALTHLAB_CORE_RNG_HPP

#include <cstdint>

namespace wealthlab {

// Counter-based uniform draws: every (seed, stream, counter) triple maps to
// one value through a stateless hash, so results do not depend on the order
// in which agents or workers consume them.

// murmur3 fmix64 finalizer
constexpr uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

constexpr uint64_t counter_hash(uint64_t seed, uint64_t stream, uint64_t counter) {
  uint64_t z = mix64(seed + 0x9e3779b97f4a7c15ULL);
  z = mix64(z ^ (stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
  z = mix64(z ^ (counter * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL));
  return z;
}

// uniform in [0, 1) with 53 random bits
constexpr double to_unit_interval(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double uniform01(uint64_t seed, uint64_t stream, uint64_t counter) {
  return to_unit_interval(counter_hash(seed, stream, counter));
}

}  // namespace wealthlab

#endif
