#pragma once

#include <cstdint>
#include <random>

namespace blockcode {

/// SplitMix64 finalizer. Used to turn (seed, index) pairs into well-separated
/// engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream owned by a single caller.
///
/// Monte-Carlo loops derive one substream per block of trials from
/// (master seed, block index), so results do not depend on how trials are
/// scheduled.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform draw on the open interval (0, 1); 53 random bits.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal draw (Box-Muller, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Trials per substream block in Monte-Carlo estimators.
inline constexpr std::uint64_t kTrialsPerSubstream = 4096;

}  // namespace blockcode
