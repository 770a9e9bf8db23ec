#include "agreelab/samplers.hpp"

#include <string>

#include "agreelab/errors.hpp"

namespace agl {

Mask128 sample_k_subset_mask(unsigned n, unsigned k, RandomStream& rng) {
  if (k > n) throw parameter_error("sample_k_subset: k > n");
  if (n > Mask128::capacity) throw parameter_error("sample_k_subset: n > 128");
  Mask128 out;
  for (unsigned j = n - k; j < n; ++j) {
    const auto cand = static_cast<unsigned>(rng.next_below(j + 1));
    if (out.test(cand))
      out.set(j);
    else
      out.set(cand);
  }
  return out;
}

VertexSet sample_k_subset(unsigned n, unsigned k, RandomStream& rng) {
  return VertexSet(sample_k_subset_mask(n, k, rng));
}

Mask128 sample_subset_of(const std::vector<unsigned>& members, unsigned k, RandomStream& rng) {
  const auto n = static_cast<unsigned>(members.size());
  if (k > n) throw parameter_error("sample_subset_of: k larger than universe");
  const Mask128 idx = sample_k_subset_mask(n, k, rng);
  Mask128 out;
  idx.for_each([&](unsigned i) { out.set(members[i]); });
  return out;
}

std::pair<Mask128, Mask128> sample_pair_nu_mask(const TestParams& p, RandomStream& rng) {
  p.validate();
  if (p.n < 2 * p.k - p.t)
    throw parameter_error("sample_pair_nu: need n >= 2k - t (disjoint completions must fit)");
  const Mask128 u = sample_k_subset_mask(p.n, p.t, rng);
  return sample_pair_nu_fixed(p, u, rng);
}

std::pair<Mask128, Mask128> sample_pair_nu_fixed(const TestParams& p, const Mask128& u,
                                                 RandomStream& rng) {
  if (u.count() != p.t) throw parameter_error("sample_pair_nu_fixed: |U| != t");
  if (p.n < 2 * p.k - p.t) throw parameter_error("sample_pair_nu_fixed: need n >= 2k - t");
  const std::vector<unsigned> rest = complement_members(u, p.n);
  const unsigned m = p.k - p.t;
  // One pass of partial Fisher-Yates selects 2m distinct elements; the first
  // m complete S1, the next m complete S2.
  std::vector<unsigned> pool = rest;
  Mask128 s1 = u, s2 = u;
  for (unsigned i = 0; i < 2 * m; ++i) {
    const auto j = i + static_cast<unsigned>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    if (i < m)
      s1.set(pool[i]);
    else
      s2.set(pool[i]);
  }
  return {s1, s2};
}

std::pair<Mask128, Mask128> sample_pair_nu_containing(const TestParams& p, const Mask128& anchor,
                                                      RandomStream& rng) {
  const unsigned a = anchor.count();
  if (a > p.t) throw parameter_error("sample_pair_nu_containing: |anchor| > t");
  if (!anchor.subset_of(Mask128::full(p.n)))
    throw parameter_error("sample_pair_nu_containing: anchor outside [0,n)");
  const std::vector<unsigned> rest = complement_members(anchor, p.n);
  const Mask128 u = anchor | sample_subset_of(rest, p.t - a, rng);
  return sample_pair_nu_fixed(p, u, rng);
}

std::pair<VertexSet, VertexSet> sample_pair_nu(const TestParams& p, RandomStream& rng) {
  auto [a, b] = sample_pair_nu_mask(p, rng);
  return {VertexSet(a), VertexSet(b)};
}

std::pair<Mask128, Mask128> sample_pair_mu_mask(unsigned n, const BiasedPairParams& bp,
                                                RandomStream& rng) {
  bp.validate();
  if (n > Mask128::capacity) throw parameter_error("sample_pair_mu: n > 128");
  const double both = bp.p * bp.q;
  const double only = bp.p * (1.0 - bp.q);
  Mask128 s1, s2;
  for (unsigned x = 0; x < n; ++x) {
    const double u = rng.next_real();
    if (u < both) {
      s1.set(x);
      s2.set(x);
    } else if (u < both + only) {
      s1.set(x);
    } else if (u < both + 2.0 * only) {
      s2.set(x);
    }
  }
  return {s1, s2};
}

std::pair<VertexSet, VertexSet> sample_pair_mu(unsigned n, const BiasedPairParams& bp,
                                               RandomStream& rng) {
  auto [a, b] = sample_pair_mu_mask(n, bp, rng);
  return {VertexSet(a), VertexSet(b)};
}

Mask128 sample_mu_p_of(const std::vector<unsigned>& members, double p, RandomStream& rng) {
  Mask128 out;
  for (unsigned v : members)
    if (rng.next_real() < p) out.set(v);
  return out;
}

Mask128 sample_mu_p(unsigned n, double p, RandomStream& rng) {
  if (n > Mask128::capacity) throw parameter_error("sample_mu_p: n > 128");
  Mask128 out;
  for (unsigned v = 0; v < n; ++v)
    if (rng.next_real() < p) out.set(v);
  return out;
}

}  // namespace agl
