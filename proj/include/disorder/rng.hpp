#pragma once

#include <cstdint>

namespace disorder {

/// SplitMix64 with the constants of the common reference implementation.
/// The output sequence is fixed by the seed on every platform.
class SplitMix64 {
 public:
  static constexpr int kVersion = 1;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Seed of substream `stream` of entity `index` under `base`. Distinct
/// (index, stream) pairs give unrelated SplitMix64 sequences.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t stream) {
  SplitMix64 mix(base ^ 0x6a09e667f3bcc909ULL);
  std::uint64_t s = mix.next() ^ (index * 0xd1b54a32d192ed03ULL);
  SplitMix64 mix2(s);
  s = mix2.next() ^ (stream * 0x8cb92ba72f3d8dd7ULL);
  return SplitMix64(s).next();
}

}  // namespace disorder
