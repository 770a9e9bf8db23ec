#include "agreelab/kernels.hpp"

namespace agl::kernels {

#if defined(AGL_BUILD_AVX2) && defined(__x86_64__)
namespace avx2 {
bool any_contained(const std::uint64_t*, const std::uint64_t*, std::size_t, Mask128);
std::size_t count_contained(const std::uint64_t*, const std::uint64_t*, std::size_t, Mask128);
std::size_t count_contained_capped(const std::uint64_t*, const std::uint64_t*, std::size_t,
                                   Mask128, std::size_t);
std::size_t count_supersets(const std::uint64_t*, const std::uint64_t*, std::size_t, Mask128);
}  // namespace avx2
#endif

#if defined(AGL_BUILD_NEON)
namespace neon {
bool any_contained(const std::uint64_t*, const std::uint64_t*, std::size_t, Mask128);
std::size_t count_contained(const std::uint64_t*, const std::uint64_t*, std::size_t, Mask128);
std::size_t count_contained_capped(const std::uint64_t*, const std::uint64_t*, std::size_t,
                                   Mask128, std::size_t);
std::size_t count_supersets(const std::uint64_t*, const std::uint64_t*, std::size_t, Mask128);
}  // namespace neon
#endif

namespace {

const Backend kScalar{scalar::any_contained, scalar::count_contained,
                      scalar::count_contained_capped, scalar::count_supersets, "scalar"};

#if defined(AGL_BUILD_AVX2) && defined(__x86_64__)
const Backend kAvx2{avx2::any_contained, avx2::count_contained, avx2::count_contained_capped,
                    avx2::count_supersets, "avx2"};
#endif
#if defined(AGL_BUILD_NEON)
const Backend kNeon{neon::any_contained, neon::count_contained, neon::count_contained_capped,
                    neon::count_supersets, "neon"};
#endif

const Backend* detect() {
#if defined(AGL_BUILD_AVX2) && defined(__x86_64__)
  if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
#if defined(AGL_BUILD_NEON)
  return &kNeon;
#endif
  return &kScalar;
}

const Backend*& active_slot() {
  static const Backend* active = detect();
  return active;
}

}  // namespace

const Backend& backend() { return *active_slot(); }

const Backend& scalar_backend() { return kScalar; }

bool force_backend(std::string_view name) {
  if (name == "scalar") {
    active_slot() = &kScalar;
    return true;
  }
#if defined(AGL_BUILD_AVX2) && defined(__x86_64__)
  if (name == "avx2" && __builtin_cpu_supports("avx2")) {
    active_slot() = &kAvx2;
    return true;
  }
#endif
#if defined(AGL_BUILD_NEON)
  if (name == "neon") {
    active_slot() = &kNeon;
    return true;
  }
#endif
  return false;
}

}  // namespace agl::kernels
