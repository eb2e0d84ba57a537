#pragma once

#include <cmath>
#include <cstdint>

namespace tanirf {

// 64-bit avalanche finalizer (splitmix64 finalization constants). Every
// bucket index, sketch hash and stream seed in the library funnels through
// this one function, and its output is pinned bit-exactly by tests.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Substream tags, one per consumer, so draws in different modules never alias
// even when they share a master seed.
namespace stream_tag {
inline constexpr std::uint64_t kSynth = 0x5459;
inline constexpr std::uint64_t kCws = 0x4357;
inline constexpr std::uint64_t kXi = 0x5849;
inline constexpr std::uint64_t kPrefactorShift = 0x5153;
inline constexpr std::uint64_t kSketchBucket = 0x4342;
inline constexpr std::uint64_t kSketchSign = 0x4347;
inline constexpr std::uint64_t kSketchComponent = 0x5443;
inline constexpr std::uint64_t kTdpPrefactor = 0x5450;
inline constexpr std::uint64_t kTdpPoly = 0x544C;
inline constexpr std::uint64_t kTdpPair = 0x5452;
inline constexpr std::uint64_t kGpSubset = 0x4753;
inline constexpr std::uint64_t kGpSample = 0x4744;
inline constexpr std::uint64_t kThompson = 0x5448;
}  // namespace stream_tag

// Deterministic counter-based stream. The substream for index k of a master
// seed starts at mix64(master ^ mix64(k)); outputs are the splitmix64
// sequence from that state. Identical (seed, index) pairs yield identical
// streams on every platform, independent of threading.
class SeedStream {
 public:
  SeedStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : state_(derive(master_seed, stream_index)) {}

  static constexpr std::uint64_t derive(std::uint64_t master_seed,
                                        std::uint64_t stream_index) noexcept {
    return mix64(master_seed ^ mix64(stream_index));
  }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform on [0,1).
  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1), safe under log().
  double next_unit_open() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // Exp(1) by inversion.
  double next_exponential() noexcept { return -std::log(next_unit_open()); }

  // Gamma(2,1) as the sum of two unit exponentials; strictly positive.
  double next_gamma21() noexcept { return next_exponential() + next_exponential(); }

  // Standard normal via Box-Muller (cosine branch).
  double next_gaussian() noexcept {
    double u1 = next_unit_open();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace tanirf
