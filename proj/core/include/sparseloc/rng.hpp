#pragma once

#include <cstdint>
#include <initializer_list>

namespace sparseloc::rng {

/// SplitMix64 step (Steele, Lea, Flood 2014). Advances `state` and returns
/// the next 64-bit output. Used both as the base generator and as the mixer
/// for deriving independent sub-streams, so every consumer of randomness in
/// this library is reproducible bit-for-bit across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// A deterministic sub-stream addressed by (seed, tag...). The tags are
/// folded into the state one SplitMix64 step at a time, so streams with
/// different addresses are decorrelated while identical addresses always
/// reproduce the same sequence.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) { (void)splitmix64(state_); }

  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) : state_(seed) {
    for (std::uint64_t t : tags) {
      state_ ^= splitmix64(state_) + t;
      (void)splitmix64(state_);
    }
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Box-Muller transform (cosine branch only, two
  /// uniforms consumed per call). No state is cached between calls.
  double normal();

  /// Uniform integer in [0, bound).
  std::uint64_t uniform_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
  }

 private:
  std::uint64_t state_;
};

}  // namespace sparseloc::rng
