#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace implausify {

/// FNV-1a over the raw bytes. Stable across platforms and runs, unlike
/// std::hash; output files depend on it staying fixed.
constexpr std::uint64_t stable_hash64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Order-sensitive seed combiner (splitmix-style finalizer).
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-story seed: stable hash of (global seed, story id), so processing
/// order cannot change per-story outputs.
constexpr std::uint64_t story_seed(std::uint64_t global_seed, std::string_view story_id) {
  return mix_seed(global_seed, stable_hash64(story_id));
}

/// Deterministic splitmix64 stream. All randomness in the library goes
/// through this class; std distributions are avoided because their output
/// is not pinned by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed), initial_seed_(seed) {}

  std::uint64_t initial_seed() const { return initial_seed_; }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound). bound must be > 0.
  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Independent substream derived from this rng's seed and a label.
  Rng fork(std::uint64_t stream) const { return Rng(mix_seed(initial_seed_, stream)); }
  Rng fork(std::string_view label) const { return fork(stable_hash64(label)); }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

 private:
  std::uint64_t state_;
  std::uint64_t initial_seed_;
};

}  // namespace implausify
