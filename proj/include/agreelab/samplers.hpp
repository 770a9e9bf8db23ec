#pragma once

#include <utility>
#include <vector>

#include "agreelab/params.hpp"
#include "agreelab/rng.hpp"
#include "agreelab/vertex_set.hpp"

namespace agl {

/// Uniform k-subset of [0,n). Robert Floyd's algorithm; O(k) draws.
Mask128 sample_k_subset_mask(unsigned n, unsigned k, RandomStream& rng);
VertexSet sample_k_subset(unsigned n, unsigned k, RandomStream& rng);

/// Uniform k-subset of the given member list.
Mask128 sample_subset_of(const std::vector<unsigned>& members, unsigned k, RandomStream& rng);

/// nu_{n,k,t}: draw the intersection U of size t uniformly, then two disjoint
/// uniform (k-t)-completions from [n] \ U. |S1 ∩ S2| = t exactly, each
/// marginal uniform over C(n,k).
std::pair<Mask128, Mask128> sample_pair_nu_mask(const TestParams& p, RandomStream& rng);
std::pair<VertexSet, VertexSet> sample_pair_nu(const TestParams& p, RandomStream& rng);

/// nu pair conditioned on S1 ∩ S2 containing `anchor` (|anchor| <= t): the
/// remaining t-|anchor| intersection elements are drawn directly, never by
/// rejection.
std::pair<Mask128, Mask128> sample_pair_nu_containing(const TestParams& p, const Mask128& anchor,
                                                      RandomStream& rng);

/// nu pair with the intersection fixed to exactly `u` (|u| = t).
std::pair<Mask128, Mask128> sample_pair_nu_fixed(const TestParams& p, const Mask128& u,
                                                 RandomStream& rng);

/// mu_{p,q}: independently per element, both sets with probability pq, one
/// set only with probability p(1-q) each, neither otherwise.
std::pair<Mask128, Mask128> sample_pair_mu_mask(unsigned n, const BiasedPairParams& bp,
                                                RandomStream& rng);
std::pair<VertexSet, VertexSet> sample_pair_mu(unsigned n, const BiasedPairParams& bp,
                                               RandomStream& rng);

/// mu_p sample over the given member list.
Mask128 sample_mu_p_of(const std::vector<unsigned>& members, double p, RandomStream& rng);
Mask128 sample_mu_p(unsigned n, double p, RandomStream& rng);

}  // namespace agl
