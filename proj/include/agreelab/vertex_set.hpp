#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "agreelab/mask.hpp"

namespace agl {

/// A finite subset of the ground set [0,n). Canonical: members are strictly
/// increasing with no duplicates, so two sets are equal iff their member
/// sequences are identical. The bitmask mirror backs all set algebra.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<unsigned> members);
  explicit VertexSet(std::vector<unsigned> members);  // sorts, rejects dups/overflow
  explicit VertexSet(const Mask128& mask);

  static VertexSet range(unsigned n);

  unsigned size() const { return static_cast<unsigned>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(unsigned v) const { return mask_.test(v); }
  const std::vector<std::uint16_t>& members() const { return members_; }
  const Mask128& mask() const { return mask_; }
  unsigned max_member() const;  // parameter_error when empty

  bool subset_of(const VertexSet& o) const { return mask_.subset_of(o.mask_); }
  VertexSet intersect(const VertexSet& o) const { return VertexSet(mask_ & o.mask_); }
  VertexSet unite(const VertexSet& o) const { return VertexSet(mask_ | o.mask_); }
  VertexSet minus(const VertexSet& o) const { return VertexSet(mask_ - o.mask_); }

  friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.mask_ == b.mask_; }
  friend bool operator!=(const VertexSet& a, const VertexSet& b) { return !(a == b); }

  /// Comma-joined sorted indices, e.g. "2,5,11"; "" for the empty set.
  std::string to_key() const;

 private:
  std::vector<std::uint16_t> members_;
  Mask128 mask_;
};

inline bool lex_less(const VertexSet& a, const VertexSet& b) {
  return lex_less(a.mask(), b.mask());
}

struct VertexSetHash {
  std::size_t operator()(const VertexSet& s) const { return Mask128Hash{}(s.mask()); }
};

/// Members of [0,n) \ s, ascending.
std::vector<unsigned> complement_members(const Mask128& s, unsigned n);

}  // namespace agl
