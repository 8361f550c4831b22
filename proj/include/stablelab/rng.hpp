#pragma once

#include <cstdint>
#include <random>

namespace stablelab::rng {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream derivation rule used everywhere a seed is split:
///
///   child_seed = splitmix64(seed ^ splitmix64(stream_id))
///
/// Stream ids are partitioned into namespaces by their top byte (see
/// `Stream`), so generation streams never collide with quadrature or
/// trial streams built from the same user seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  return splitmix64(seed ^ splitmix64(stream_id));
}

namespace stream {
inline constexpr std::uint64_t kInstance = 0x01ULL << 56;
inline constexpr std::uint64_t kLatent = 0x02ULL << 56;
inline constexpr std::uint64_t kQuadrature = 0x03ULL << 56;
inline constexpr std::uint64_t kTrial = 0x04ULL << 56;
inline constexpr std::uint64_t kSpacings = 0x05ULL << 56;
inline constexpr std::uint64_t kShape = 0x06ULL << 56;
}  // namespace stream

/// 64-bit generator with portable (implementation-independent) derived
/// distributions. The raw engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the uniform mappings below are ours so that
/// results do not depend on the standard library vendor.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound), bound > 0 (Lemire's multiply-shift
  /// with rejection).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 gen_;
};

}  // namespace stablelab::rng
