#pragma once

#include <array>
#include <cstdint>

namespace tsabc {

// Splittable random stream used by every sampler in the library.
//
// Generator: xoshiro256++ (Blackman & Vigna), state seeded from a 64-bit key
// expanded through splitmix64. Both algorithms are fixed here, so a given
// (seed, stream_id) replays the same draw sequence on any platform; nothing
// from <random> is used because the standard does not pin distribution
// algorithms.
//
// Substreams are derived by hashing (key, domain tag, index) through the
// splitmix64 finalizer. `substream(i)` is stateless (derived from the
// stream's identity, not from how many draws were consumed), which is what
// makes per-datum / per-particle partitions replay-stable and safe to
// evaluate in any order, including in parallel. `spawn()` derives from an
// internal counter and is meant for sequential consumers (one fresh block
// per MCMC iteration, say).
//
// A stream is a value: copy or move it freely between threads, but never
// share one instance between two threads at the same time.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : RngStream(FromKey{}, derive(derive(kRootDomain, seed), stream_id)) {}

  // Next raw 64-bit word (xoshiro256++).
  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); safe to pass to log().
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Independent stream keyed by (this stream's identity, index). Stateless:
  // the result does not depend on draws already consumed.
  RngStream substream(std::uint64_t index) const {
    return RngStream(FromKey{}, derive(derive(kSubstreamDomain, key_), index));
  }

  // Independent stream keyed by an internal counter; successive calls give
  // distinct streams.
  RngStream spawn() {
    return RngStream(FromKey{}, derive(derive(kSpawnDomain, key_), ++spawn_count_));
  }

  std::uint64_t key() const { return key_; }

 private:
  static constexpr std::uint64_t kRootDomain = 0x746162635f726f6fULL;
  static constexpr std::uint64_t kSubstreamDomain = 0x746162635f737562ULL;
  static constexpr std::uint64_t kSpawnDomain = 0x746162635f737077ULL;

  struct FromKey {};
  RngStream(FromKey, std::uint64_t key) : key_(key) {
    // Expand the key into the xoshiro state with the stateful splitmix64.
    std::uint64_t x = key;
    for (auto& word : state_) word = splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 0x9e3779b97f4a7c15ULL;
  }

  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Key-derivation: mix two words through the splitmix64 finalizer.
  static std::uint64_t derive(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL);
    return splitmix64(x);
  }

  std::uint64_t key_;
  std::uint64_t spawn_count_ = 0;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace tsabc
