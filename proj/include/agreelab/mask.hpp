#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <functional>

namespace agl {

/// Subset of [0,128) as a pair of 64-bit words. This is the working currency
/// of every inner loop; ground sets larger than 128 are rejected at the API
/// boundary.
struct Mask128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  static constexpr unsigned capacity = 128;

  static constexpr Mask128 empty_set() { return {}; }

  /// Mask with bits [0,n) set.
  static constexpr Mask128 full(unsigned n) {
    Mask128 m;
    if (n >= 64) {
      m.lo = ~std::uint64_t{0};
      m.hi = (n >= 128) ? ~std::uint64_t{0}
                        : ((n == 64) ? 0 : ((std::uint64_t{1} << (n - 64)) - 1));
    } else {
      m.lo = (std::uint64_t{1} << n) - 1;
    }
    return m;
  }

  static constexpr Mask128 single(unsigned i) {
    Mask128 m;
    if (i < 64)
      m.lo = std::uint64_t{1} << i;
    else
      m.hi = std::uint64_t{1} << (i - 64);
    return m;
  }

  constexpr bool test(unsigned i) const {
    return i < 64 ? ((lo >> i) & 1u) : ((hi >> (i - 64)) & 1u);
  }
  constexpr void set(unsigned i) {
    if (i < 64)
      lo |= std::uint64_t{1} << i;
    else
      hi |= std::uint64_t{1} << (i - 64);
  }
  constexpr void reset(unsigned i) {
    if (i < 64)
      lo &= ~(std::uint64_t{1} << i);
    else
      hi &= ~(std::uint64_t{1} << (i - 64));
  }

  constexpr unsigned count() const {
    return static_cast<unsigned>(std::popcount(lo) + std::popcount(hi));
  }
  constexpr bool empty() const { return (lo | hi) == 0; }

  constexpr bool subset_of(const Mask128& o) const {
    return (lo & ~o.lo) == 0 && (hi & ~o.hi) == 0;
  }
  constexpr bool intersects(const Mask128& o) const {
    return (lo & o.lo) != 0 || (hi & o.hi) != 0;
  }

  friend constexpr Mask128 operator&(Mask128 a, const Mask128& b) {
    a.lo &= b.lo;
    a.hi &= b.hi;
    return a;
  }
  friend constexpr Mask128 operator|(Mask128 a, const Mask128& b) {
    a.lo |= b.lo;
    a.hi |= b.hi;
    return a;
  }
  friend constexpr Mask128 operator^(Mask128 a, const Mask128& b) {
    a.lo ^= b.lo;
    a.hi ^= b.hi;
    return a;
  }
  /// Set difference a \ b.
  friend constexpr Mask128 operator-(Mask128 a, const Mask128& b) {
    a.lo &= ~b.lo;
    a.hi &= ~b.hi;
    return a;
  }
  friend constexpr bool operator==(const Mask128& a, const Mask128& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }

  /// Smallest member; undefined on the empty mask.
  constexpr unsigned lowest() const {
    return lo ? static_cast<unsigned>(std::countr_zero(lo))
              : 64 + static_cast<unsigned>(std::countr_zero(hi));
  }

  /// Invoke f(i) for every member in increasing order.
  template <class F>
  void for_each(F&& f) const {
    std::uint64_t w = lo;
    while (w) {
      f(static_cast<unsigned>(std::countr_zero(w)));
      w &= w - 1;
    }
    w = hi;
    while (w) {
      f(64 + static_cast<unsigned>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
};

/// Dictionary order on the increasing member sequences. Everything below the
/// lowest differing element v is a shared prefix; the side holding v wins
/// unless the other side ends there (a proper prefix comes first).
constexpr bool lex_less(const Mask128& a, const Mask128& b) {
  const Mask128 d = a ^ b;
  if (d.empty()) return false;
  const unsigned v = d.lowest();
  const Mask128 through_v = Mask128::full(v + 1);
  if (a.test(v)) return !(b - through_v).empty();
  return (a - through_v).empty();
}

struct Mask128Hash {
  std::size_t operator()(const Mask128& m) const {
    std::uint64_t x = m.lo * 0x9e3779b97f4a7c15ull;
    x ^= (m.hi + 0x517cc1b727220a95ull) + (x << 6) + (x >> 2);
    x *= 0xbf58476d1ce4e5b9ull;
    return static_cast<std::size_t>(x ^ (x >> 29));
  }
};

}  // namespace agl
