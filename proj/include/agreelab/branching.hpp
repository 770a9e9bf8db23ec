#pragma once

#include <optional>

#include "agreelab/hypergraph.hpp"

namespace agl {

/// Outcome of a branching-factor check at rho: ok iff every vertex set A and
/// every r >= 0 see at most rho^r edges of cardinality |A|+r containing A.
struct BranchingWitness {
  VertexSet a;
  unsigned r;
  std::size_t count;
};

struct BranchingReport {
  double rho = 1.0;
  bool ok = true;
  std::optional<BranchingWitness> witness;
};

/// Exact check. Only A that are subsets of existing edges (plus A = ∅) are
/// enumerated: any other A has zero extensions for r >= 1, and its r = 0
/// count is at most 1. rho may be non-integral; counts are compared against
/// the real value rho^r.
BranchingReport check_branching(const Hypergraph& h, double rho);

/// Smallest rho at which the check passes (max over candidates of
/// count^{1/r}); 1.0 for hypergraphs with at most one edge per site.
double minimal_branching_factor(const Hypergraph& h);

}  // namespace agl
