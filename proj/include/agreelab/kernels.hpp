#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "agreelab/mask.hpp"

namespace agl::kernels {

/// Hot inner loops over packed edge masks (structure-of-arrays: lo[i]/hi[i]
/// is edge i). Scalar reference implementations define the semantics; the
/// AVX2/NEON variants are selected at runtime and equivalence-tested against
/// the reference.
struct Backend {
  /// True iff some edge e satisfies e ⊆ s.
  bool (*any_contained)(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                        Mask128 s);
  /// Number of edges e with e ⊆ s.
  std::size_t (*count_contained)(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                                 Mask128 s);
  /// Number of edges e with e ⊆ s, stopping once `cap` is reached.
  std::size_t (*count_contained_capped)(const std::uint64_t* lo, const std::uint64_t* hi,
                                        std::size_t m, Mask128 s, std::size_t cap);
  /// Number of edges e with a ⊆ e.
  std::size_t (*count_supersets)(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                                 Mask128 a);
  const char* name;
};

namespace scalar {
bool any_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m, Mask128 s);
std::size_t count_contained(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 s);
std::size_t count_contained_capped(const std::uint64_t* lo, const std::uint64_t* hi,
                                   std::size_t m, Mask128 s, std::size_t cap);
std::size_t count_supersets(const std::uint64_t* lo, const std::uint64_t* hi, std::size_t m,
                            Mask128 a);
}  // namespace scalar

/// Active backend (best variant the CPU supports, resolved once).
const Backend& backend();

/// Scalar reference backend, always available.
const Backend& scalar_backend();

/// Override the active backend by name ("scalar", "avx2", "neon"). Returns
/// false if the variant is not compiled in or not supported by this CPU.
bool force_backend(std::string_view name);

}  // namespace agl::kernels
