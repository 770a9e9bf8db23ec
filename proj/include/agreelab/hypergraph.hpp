#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agreelab/kernels.hpp"
#include "agreelab/vertex_set.hpp"

namespace agl {

/// A finite family of vertex subsets over the ground set [0,n). Edges are
/// kept sorted in dictionary order with duplicates merged, which makes
/// "lexicographically least" selections a matter of iteration order and keeps
/// serialization canonical.
///
/// Edges are normally nonempty; the text format rejects empty edges. The one
/// sanctioned use of an empty edge is the 0-uniform hypergraph {∅} produced
/// at the bottom of the pruning recursion, where it means "every set hits".
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(unsigned n, std::vector<VertexSet> edges, bool allow_empty_edge = false);

  unsigned ground_size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<VertexSet>& edges() const { return edges_; }
  const VertexSet& edge(std::size_t i) const { return edges_[i]; }

  /// Max edge size; 0 for the empty hypergraph.
  unsigned uniformity() const;
  /// True when every edge has size exactly d.
  bool is_uniform(unsigned d) const;
  bool contains_edge(const Mask128& e) const;

  /// Packed masks for the containment kernels.
  const std::uint64_t* packed_lo() const { return lo_.data(); }
  const std::uint64_t* packed_hi() const { return hi_.data(); }

  /// True iff some edge is contained in s.
  bool hits(const Mask128& s) const {
    return kernels::backend().any_contained(lo_.data(), hi_.data(), edges_.size(), s);
  }
  std::size_t edges_within(const Mask128& s) const {
    return kernels::backend().count_contained(lo_.data(), hi_.data(), edges_.size(), s);
  }
  /// Number of edges containing a.
  std::size_t extensions_of(const Mask128& a) const {
    return kernels::backend().count_supersets(lo_.data(), hi_.data(), edges_.size(), a);
  }

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  unsigned n_ = 0;
  std::vector<VertexSet> edges_;
  std::vector<std::uint64_t> lo_, hi_;
};

/// Subhypergraph induced by S: edges entirely inside S, ground set unchanged.
Hypergraph restrict_to(const Hypergraph& h, const VertexSet& s);

/// Remove the vertices of A from every edge; empty results are dropped and
/// duplicates merged.
Hypergraph link_delete(const Hypergraph& h, const VertexSet& a);

/// Rebuild on the compacted ground set [0, n-|drop|) after deleting the
/// vertices of `drop` from the index space. Edges must avoid `drop`.
Hypergraph relabel_without(const Hypergraph& h, const VertexSet& drop);

/// Text format: first line "n m", then m lines of space-separated vertex
/// indices. Empty edges are rejected.
Hypergraph parse_hypergraph(const std::string& text);
std::string format_hypergraph(const Hypergraph& h);
Hypergraph load_hypergraph(const std::string& path);
void save_hypergraph(const Hypergraph& h, const std::string& path);

}  // namespace agl
