#pragma once

#include <cstdint>
#include <optional>

#include "agreelab/hypergraph.hpp"
#include "agreelab/rng.hpp"
#include "agreelab/stats.hpp"

namespace agl {

/// Distribution of the random set S used by hit/unique-hit computations:
/// either a uniform k-subset of [0,n) or mu_p (independent inclusion with
/// probability p).
struct SubsetDist {
  enum class Kind { uniform, biased } kind = Kind::uniform;
  unsigned n = 0;
  unsigned k = 0;
  double p = 0.0;

  static SubsetDist uniform(unsigned n, unsigned k);
  static SubsetDist biased(unsigned n, double p);

  Mask128 sample(RandomStream& rng) const;
  /// Pr[S contains a fixed set of the given size].
  double containment_prob(unsigned set_size) const;
};

/// Exactness envelope. Thresholds are configuration constants; callers with
/// special needs pass their own.
struct HitExactGuards {
  double max_enumeration = 1e7;           // uniform mode: C(n,k) budget
  double max_enumeration_cost = 4e8;      // C(n,k) * edge_count budget
  std::size_t max_ie_edges = 20;          // inclusion-exclusion edge budget
  unsigned max_dnf_vertices = 30;         // biased Shannon expansion guard
  std::size_t max_dnf_nodes = 1u << 22;   // Shannon recursion node budget
};

/// Exact probability that S contains at least one edge of h. Strategy
/// ladder: full enumeration (uniform mode), inclusion-exclusion, then for
/// the biased mode Shannon expansion of the union-of-edges DNF. Throws
/// exact_infeasible_error directing the caller to hit_mc when the instance
/// exceeds every guard.
double hit_exact(const Hypergraph& h, const SubsetDist& dist,
                 const HitExactGuards& guards = {});

/// hit_exact that reports infeasibility as nullopt instead of throwing.
std::optional<double> hit_exact_try(const Hypergraph& h, const SubsetDist& dist,
                                    const HitExactGuards& guards = {});

/// Monte Carlo estimate with Wilson 95% half-width. Samples are sharded
/// across a fixed number of derived streams (so results do not depend on the
/// thread count) and counts are summed.
McEstimate hit_mc(const Hypergraph& h, const SubsetDist& dist, std::uint64_t samples,
                  RandomStream& rng);

/// Exact when affordable under the given guards, otherwise MC with
/// `mc_samples`; the result records which path ran (exact flag / ci = 0).
McEstimate hit_eval(const Hypergraph& h, const SubsetDist& dist, std::uint64_t mc_samples,
                    RandomStream& rng, const HitExactGuards& guards = {});

}  // namespace agl
