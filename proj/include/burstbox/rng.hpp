#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace burstbox {

/// SplitMix64 (Steele/Lea/Vigna). Chosen over std::mt19937_64 because every
/// draw primitive here is fully specified, so seeded runs reproduce bit-for-bit
/// on any platform. Bounded draws use the 128-bit multiply-shift mapping
/// floor(next() * n / 2^64); Fisher-Yates shuffles run back-to-front.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, n). n = 0 returns 0.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform int in [lo, hi] inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool chance(double p) { return unit() < p; }

  /// Avalanche finalizer, usable as a standalone integer hash.
  static uint64_t fmix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Independent child stream for (seed, stream). Used to give every sample /
  /// burst / split its own generator so parallel generation stays order-free.
  static SplitMix64 derive(uint64_t seed, uint64_t stream) {
    return SplitMix64(fmix(seed ^ fmix(stream + 0x9E3779B97F4A7C15ull)));
  }

 private:
  uint64_t state_;
};

/// Back-to-front Fisher-Yates with SplitMix64::below.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace burstbox
