#include "agreelab/kernels.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

namespace agl::kernels::neon {

namespace {

// Two edges per iteration; lane i reports edge i ⊆ s.
inline unsigned contained_mask2(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t i,
                                uint64x2_t slo, uint64x2_t shi) {
  const uint64x2_t elo = vld1q_u64(lo + i);
  const uint64x2_t ehi = vld1q_u64(hi + i);
  const uint64x2_t bad = vorrq_u64(vbicq_u64(elo, slo), vbicq_u64(ehi, shi));
  const uint64x2_t ok = vceqzq_u64(bad);
  return (vgetq_lane_u64(ok, 0) & 1u) | ((vgetq_lane_u64(ok, 1) & 1u) << 1);
}

inline unsigned superset_mask2(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t i,
                               uint64x2_t alo, uint64x2_t ahi) {
  const uint64x2_t elo = vld1q_u64(lo + i);
  const uint64x2_t ehi = vld1q_u64(hi + i);
  const uint64x2_t bad = vorrq_u64(vbicq_u64(alo, elo), vbicq_u64(ahi, ehi));
  const uint64x2_t ok = vceqzq_u64(bad);
  return (vgetq_lane_u64(ok, 0) & 1u) | ((vgetq_lane_u64(ok, 1) & 1u) << 1);
}

inline unsigned popcount2(unsigned m) { return (m & 1u) + ((m >> 1) & 1u); }

}  // namespace

bool any_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m, Mask128 s) {
  const uint64x2_t slo = vdupq_n_u64(s.lo);
  const uint64x2_t shi = vdupq_n_u64(s.hi);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2)
    if (contained_mask2(lo, hi, i, slo, shi)) return true;
  return scalar::any_contained(lo + i, hi + i, m - i, s);
}

std::size_t count_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 s) {
  const uint64x2_t slo = vdupq_n_u64(s.lo);
  const uint64x2_t shi = vdupq_n_u64(s.hi);
  std::size_t c = 0, i = 0;
  for (; i + 2 <= m; i += 2) c += popcount2(contained_mask2(lo, hi, i, slo, shi));
  return c + scalar::count_contained(lo + i, hi + i, m - i, s);
}

std::size_t count_contained_capped(const std::uint64_t* lo, const std::uint64_t* hi,
                                   std::size_t m, Mask128 s, std::size_t cap) {
  const uint64x2_t slo = vdupq_n_u64(s.lo);
  const uint64x2_t shi = vdupq_n_u64(s.hi);
  std::size_t c = 0, i = 0;
  for (; i + 2 <= m && c < cap; i += 2) c += popcount2(contained_mask2(lo, hi, i, slo, shi));
  if (c >= cap) return cap;
  c += scalar::count_contained_capped(lo + i, hi + i, m - i, s, cap - c);
  return c < cap ? c : cap;
}

std::size_t count_supersets(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 a) {
  const uint64x2_t alo = vdupq_n_u64(a.lo);
  const uint64x2_t ahi = vdupq_n_u64(a.hi);
  std::size_t c = 0, i = 0;
  for (; i + 2 <= m; i += 2) c += popcount2(superset_mask2(lo, hi, i, alo, ahi));
  return c + scalar::count_supersets(lo + i, hi + i, m - i, a);
}

}  // namespace agl::kernels::neon

#endif
