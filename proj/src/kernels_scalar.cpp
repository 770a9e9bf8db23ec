#include "agreelab/kernels.hpp"

namespace agl::kernels::scalar {

bool any_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m, Mask128 s) {
  for (std::size_t i = 0; i < m; ++i)
    if ((lo[i] & ~s.lo) == 0 && (hi[i] & ~s.hi) == 0) return true;
  return false;
}

std::size_t count_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 s) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < m; ++i)
    c += ((lo[i] & ~s.lo) == 0 && (hi[i] & ~s.hi) == 0) ? 1 : 0;
  return c;
}

std::size_t count_contained_capped(const std::uint64_t* lo, const std::uint64_t* hi,
                                   std::size_t m, Mask128 s, std::size_t cap) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < m && c < cap; ++i)
    c += ((lo[i] & ~s.lo) == 0 && (hi[i] & ~s.hi) == 0) ? 1 : 0;
  return c;
}

std::size_t count_supersets(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 a) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < m; ++i)
    c += ((a.lo & ~lo[i]) == 0 && (a.hi & ~hi[i]) == 0) ? 1 : 0;
  return c;
}

}  // namespace agl::kernels::scalar
