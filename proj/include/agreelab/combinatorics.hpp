#pragma once

#include <cstdint>
#include <vector>

#include "agreelab/mask.hpp"

namespace agl {

/// C(n,k) as a double; exact for all values that fit a 53-bit mantissa,
/// +inf-safe beyond. Guards compare against enumeration budgets, so exactness
/// at astronomical sizes is irrelevant.
inline double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Probability that a uniform k-subset of [n] contains a fixed u-subset:
/// k(k-1)...(k-u+1) / (n(n-1)...(n-u+1)).
inline double uniform_containment_prob(unsigned n, unsigned k, unsigned u) {
  if (u > k) return 0.0;
  double r = 1.0;
  for (unsigned i = 0; i < u; ++i) r *= static_cast<double>(k - i) / static_cast<double>(n - i);
  return r;
}

/// Lexicographic enumeration of k-subsets of [0,n). Yields masks; callers
/// needing VertexSets wrap them at the boundary.
class KSubsetEnumerator {
 public:
  KSubsetEnumerator(unsigned n, unsigned k) : n_(n), k_(k), idx_(k), done_(k > n) {
    for (unsigned i = 0; i < k_ && !done_; ++i) idx_[i] = i;
  }

  bool done() const { return done_; }

  Mask128 current() const {
    Mask128 m;
    for (unsigned i : idx_) m.set(i);
    return m;
  }
  const std::vector<unsigned>& indices() const { return idx_; }

  void advance() {
    if (k_ == 0) {
      done_ = true;
      return;
    }
    int i = static_cast<int>(k_) - 1;
    while (i >= 0 && idx_[static_cast<unsigned>(i)] == n_ - k_ + static_cast<unsigned>(i)) --i;
    if (i < 0) {
      done_ = true;
      return;
    }
    ++idx_[static_cast<unsigned>(i)];
    for (unsigned j = static_cast<unsigned>(i) + 1; j < k_; ++j) idx_[j] = idx_[j - 1] + 1;
  }

 private:
  unsigned n_, k_;
  std::vector<unsigned> idx_;
  bool done_;
};

template <class F>
void for_each_k_subset(unsigned n, unsigned k, F&& f) {
  for (KSubsetEnumerator e(n, k); !e.done(); e.advance()) f(e.current());
}

/// All k-subsets of the given member list (not of [0,n)); yields masks over
/// the original vertex labels.
template <class F>
void for_each_k_subset_of(const std::vector<unsigned>& members, unsigned k, F&& f) {
  const auto n = static_cast<unsigned>(members.size());
  for (KSubsetEnumerator e(n, k); !e.done(); e.advance()) {
    Mask128 m;
    for (unsigned i : e.indices()) m.set(members[i]);
    f(m);
  }
}

/// Subsets of S with cardinality in [1,d], or [0,d] with include_empty, in
/// canonical order: by size ascending, lexicographic within a size. This
/// order is the layout contract for local-function tables.
template <class F>
void for_each_small_subset(const Mask128& s, unsigned d, bool include_empty, F&& f) {
  std::vector<unsigned> members;
  members.reserve(s.count());
  s.for_each([&](unsigned i) { members.push_back(i); });
  if (include_empty) f(Mask128::empty_set());
  const auto limit = static_cast<unsigned>(members.size());
  for (unsigned size = 1; size <= d && size <= limit; ++size)
    for_each_k_subset_of(members, size, f);
}

inline std::vector<Mask128> small_subsets(const Mask128& s, unsigned d, bool include_empty) {
  std::vector<Mask128> out;
  for_each_small_subset(s, d, include_empty, [&](const Mask128& a) { out.push_back(a); });
  return out;
}

}  // namespace agl
