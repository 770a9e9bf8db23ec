#include "agreelab/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <bit>

namespace agl::kernels::avx2 {

namespace {

// Per 4-edge block: bit i of the returned mask is set iff edge i ⊆ s.
inline int contained_mask4(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t i,
                           __m256i slo, __m256i shi) {
  const __m256i elo = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lo + i));
  const __m256i ehi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hi + i));
  // e ⊆ s  <=>  (e & ~s) == 0
  const __m256i bad = _mm256_or_si256(_mm256_andnot_si256(slo, elo), _mm256_andnot_si256(shi, ehi));
  const __m256i ok = _mm256_cmpeq_epi64(bad, _mm256_setzero_si256());
  return _mm256_movemask_pd(_mm256_castsi256_pd(ok));
}

inline int superset_mask4(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t i,
                          __m256i alo, __m256i ahi) {
  const __m256i elo = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lo + i));
  const __m256i ehi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hi + i));
  // a ⊆ e  <=>  (a & ~e) == 0
  const __m256i bad = _mm256_or_si256(_mm256_andnot_si256(elo, alo), _mm256_andnot_si256(ehi, ahi));
  const __m256i ok = _mm256_cmpeq_epi64(bad, _mm256_setzero_si256());
  return _mm256_movemask_pd(_mm256_castsi256_pd(ok));
}

}  // namespace

bool any_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m, Mask128 s) {
  const __m256i slo = _mm256_set1_epi64x(static_cast<long long>(s.lo));
  const __m256i shi = _mm256_set1_epi64x(static_cast<long long>(s.hi));
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4)
    if (contained_mask4(lo, hi, i, slo, shi)) return true;
  return scalar::any_contained(lo + i, hi + i, m - i, s);
}

std::size_t count_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 s) {
  const __m256i slo = _mm256_set1_epi64x(static_cast<long long>(s.lo));
  const __m256i shi = _mm256_set1_epi64x(static_cast<long long>(s.hi));
  std::size_t c = 0, i = 0;
  for (; i + 4 <= m; i += 4)
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(contained_mask4(lo, hi, i, slo, shi))));
  return c + scalar::count_contained(lo + i, hi + i, m - i, s);
}

std::size_t count_contained_capped(const std::uint64_t* lo, const std::uint64_t* hi,
                                   std::size_t m, Mask128 s, std::size_t cap) {
  const __m256i slo = _mm256_set1_epi64x(static_cast<long long>(s.lo));
  const __m256i shi = _mm256_set1_epi64x(static_cast<long long>(s.hi));
  std::size_t c = 0, i = 0;
  for (; i + 4 <= m && c < cap; i += 4)
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(contained_mask4(lo, hi, i, slo, shi))));
  if (c >= cap) return cap;
  c += scalar::count_contained_capped(lo + i, hi + i, m - i, s, cap - c);
  return c < cap ? c : cap;
}

std::size_t count_supersets(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 a) {
  const __m256i alo = _mm256_set1_epi64x(static_cast<long long>(a.lo));
  const __m256i ahi = _mm256_set1_epi64x(static_cast<long long>(a.hi));
  std::size_t c = 0, i = 0;
  for (; i + 4 <= m; i += 4)
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(superset_mask4(lo, hi, i, alo, ahi))));
  return c + scalar::count_supersets(lo + i, hi + i, m - i, a);
}

}  // namespace agl::kernels::avx2

#endif  // __AVX2__
