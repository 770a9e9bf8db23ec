#pragma once

#include <cstdint>
#include <string_view>

#include "agreelab/mask.hpp"

namespace agl {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

/// Deterministic counter-based random stream. A master seed derives
/// independent per-task streams by name or index, so concurrent estimators
/// never share state and every run is reproducible from the seed alone.
class RandomStream {
 public:
  RandomStream() : RandomStream(0) {}
  explicit RandomStream(std::uint64_t seed)
      : key_(detail::splitmix64(seed ^ 0x1905ull)), counter_(0) {}

  std::uint64_t next_u64() {
    return detail::splitmix64(key_ ^ detail::splitmix64(counter_++ + key_));
  }

  /// In [0, bound). Unbiased (Lemire rejection). bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto l = static_cast<std::uint64_t>(m);
    if (l < bound) {
      const std::uint64_t t = (0 - bound) % bound;
      while (l < t) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        l = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform in [0,1) with 53 random bits.
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_real() < p; }

  /// Independent child stream; does not disturb this stream's sequence.
  RandomStream derive(std::uint64_t label) const {
    RandomStream s;
    s.key_ = detail::splitmix64(key_ ^ detail::splitmix64(label ^ 0x2c1b3c6dull));
    s.counter_ = 0;
    return s;
  }
  RandomStream derive(std::string_view label) const { return derive(detail::fnv1a(label)); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Keyed hash of a vertex set. Stable across runs and platforms; used for
/// per-set and per-entry corruption decisions so that the same set is
/// corrupted consistently no matter which estimator looks at it.
constexpr std::uint64_t keyed_set_hash(std::uint64_t key, const Mask128& s,
                                       std::uint64_t salt = 0) {
  std::uint64_t h = detail::splitmix64(key ^ detail::splitmix64(salt ^ 0x77d1ull));
  h = detail::splitmix64(h ^ s.lo);
  h = detail::splitmix64(h ^ s.hi);
  return h;
}

constexpr std::uint64_t keyed_pair_hash(std::uint64_t key, const Mask128& s,
                                        const Mask128& a, std::uint64_t salt = 0) {
  return detail::splitmix64(keyed_set_hash(key, s, salt) ^ keyed_set_hash(~key, a, salt));
}

/// Map a 64-bit hash to true with probability rate.
inline bool hash_below(std::uint64_t h, double rate) {
  return static_cast<double>(h >> 11) * 0x1.0p-53 < rate;
}

}  // namespace agl
