#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <string_view>

namespace aniso {

/// 64-bit finalizer from SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of replica `index` of stream `name` under `master`.
///
/// Frozen: changing this function changes every recorded run.
///   derive_seed(m, name, i) = mix64(mix64(m ^ mix64(fnv1a64(name))) + mix64(i + 1))
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index) {
  const std::uint64_t stream = mix64(master ^ mix64(fnv1a64(name)));
  return mix64(stream + mix64(index + 1));
}

/// Per-replica generator. Bit-level consumption is part of the determinism
/// contract: simulators draw from it in a fixed order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// +1 or -1 with equal probability, served from a buffered word.
  int sign() {
    if (bits_left_ == 0) {
      bits_ = engine_();
      bits_left_ = 64;
    }
    const int s = static_cast<int>(bits_ & 1U) * 2 - 1;
    bits_ >>= 1;
    --bits_left_;
    return s;
  }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

/// Net displacement of `count` (<= 64) simple +-1 steps encoded as the low bits of `word`.
inline std::int64_t bit_walk_displacement(std::uint64_t word, unsigned count) {
  const std::uint64_t mask = count >= 64 ? ~0ULL : ((1ULL << count) - 1);
  return 2 * static_cast<std::int64_t>(std::popcount(word & mask)) - static_cast<std::int64_t>(count);
}

}  // namespace aniso
