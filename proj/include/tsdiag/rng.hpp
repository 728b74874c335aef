#pragma once

// Seedable, platform-independent random streams.
//
// std::shuffle and std::uniform_int_distribution are implementation-defined,
// so shuffles here are built from xoshiro256** (seeded through SplitMix64)
// and an unbiased bounded draw. Streams for parallel work are derived from
// (seed, counter) so that each iteration sees the same numbers no matter
// which thread runs it.

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace tsdiag::rng {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with
  // rejection, so no modulo bias).
  std::uint64_t bounded(std::uint64_t bound) noexcept {
    __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<__uint128_t>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

// Seed for the independent stream numbered `counter` under `seed`.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed,
                                           std::uint64_t counter) noexcept {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state = a ^ (counter * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

// Fisher-Yates, iterating from the back.
template <typename T>
void shuffle(std::span<T> items, Xoshiro256& gen) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(gen.bounded(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace tsdiag::rng
