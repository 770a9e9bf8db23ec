#include "agreelab/hit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <thread>
#include <unordered_map>
#include <vector>

#include "agreelab/combinatorics.hpp"
#include "agreelab/errors.hpp"
#include "agreelab/samplers.hpp"

namespace agl {

SubsetDist SubsetDist::uniform(unsigned n, unsigned k) {
  if (k > n) throw parameter_error("SubsetDist::uniform: k > n");
  SubsetDist d;
  d.kind = Kind::uniform;
  d.n = n;
  d.k = k;
  return d;
}

SubsetDist SubsetDist::biased(unsigned n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("SubsetDist::biased: p outside [0,1]");
  SubsetDist d;
  d.kind = Kind::biased;
  d.n = n;
  d.p = p;
  return d;
}

Mask128 SubsetDist::sample(RandomStream& rng) const {
  if (kind == Kind::uniform) return sample_k_subset_mask(n, k, rng);
  // Geometric skipping below p = 0.2 cuts the draw count to ~np. The rule is
  // a deterministic function of p, so replay stays seed-stable.
  if (p <= 0.0) return Mask128::empty_set();
  if (p < 0.2) {
    Mask128 out;
    const double denom = std::log1p(-p);
    unsigned i = 0;
    while (true) {
      const double u = 1.0 - rng.next_real();  // (0,1]
      const double skip = std::floor(std::log(u) / denom);
      if (skip > static_cast<double>(n)) break;
      i += static_cast<unsigned>(skip);
      if (i >= n) break;
      out.set(i);
      ++i;
    }
    return out;
  }
  return sample_mu_p(n, p, rng);
}

double SubsetDist::containment_prob(unsigned set_size) const {
  if (kind == Kind::uniform) return uniform_containment_prob(n, k, set_size);
  return std::pow(p, static_cast<double>(set_size));
}

namespace {

// Superset-dominated edges never matter for "contains at least one edge":
// keep the minimal ones. Empty input distinguishes "no edges" (hit 0) from
// "contains the empty edge" (hit 1) before this is called.
std::vector<Mask128> minimal_edges(const Hypergraph& h) {
  std::vector<Mask128> edges;
  edges.reserve(h.edge_count());
  for (const auto& e : h.edges()) edges.push_back(e.mask());
  std::vector<Mask128> kept;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < edges.size() && !dominated; ++j)
      if (j != i && edges[j].subset_of(edges[i]) && !(edges[j] == edges[i])) dominated = true;
    if (!dominated) kept.push_back(edges[i]);
  }
  return kept;
}

double inclusion_exclusion(const std::vector<Mask128>& edges, const SubsetDist& dist) {
  double total = 0.0;
  // DFS over nonempty subfamilies with the running union; flips sign by
  // subset parity.
  struct Frame {
    std::size_t next;
    Mask128 uni;
    int parity;
  };
  std::vector<Frame> stack;
  stack.push_back({0, Mask128::empty_set(), 0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    for (std::size_t i = f.next; i < edges.size(); ++i) {
      const Mask128 uni = f.uni | edges[i];
      const int parity = f.parity ^ 1;
      total += (parity ? 1.0 : -1.0) * dist.containment_prob(uni.count());
      stack.push_back({i + 1, uni, parity});
    }
  }
  return total;
}

struct DnfKey {
  std::uint64_t a, b;
  bool operator==(const DnfKey& o) const { return a == o.a && b == o.b; }
};
struct DnfKeyHash {
  std::size_t operator()(const DnfKey& k) const {
    return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ull));
  }
};

DnfKey dnf_key(const std::vector<Mask128>& edges) {
  std::uint64_t a = 0xcbf29ce484222325ull, b = 0x84222325cbf29ce4ull;
  for (const auto& e : edges) {
    a = (a ^ e.lo) * 0x100000001b3ull;
    a = (a ^ e.hi) * 0x100000001b3ull;
    b = (b ^ e.hi) * 0x1000193ull + 0x9e37ull;
    b = (b ^ e.lo) * 0x1000193ull + 0x79b9ull;
  }
  return {a, b};
}

class ShannonEvaluator {
 public:
  ShannonEvaluator(double p, std::size_t node_budget) : p_(p), budget_(node_budget) {}

  double eval(std::vector<Mask128> edges) {
    if (edges.empty()) return 0.0;
    for (const auto& e : edges)
      if (e.empty()) return 1.0;
    if (budget_ == 0) throw exact_infeasible_error("hit_exact: DNF node budget exhausted; use hit_mc");
    --budget_;

    std::sort(edges.begin(), edges.end(), [](const Mask128& x, const Mask128& y) {
      return x.lo != y.lo ? x.lo < y.lo : x.hi < y.hi;
    });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const DnfKey key = dnf_key(edges);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const unsigned pivot = pick_pivot(edges);
    std::vector<Mask128> with, without;
    with.reserve(edges.size());
    without.reserve(edges.size());
    const Mask128 pv = Mask128::single(pivot);
    for (const auto& e : edges) {
      if (e.test(pivot))
        with.push_back(e - pv);
      else {
        with.push_back(e);
        without.push_back(e);
      }
    }
    const double value = p_ * eval(std::move(with)) + (1.0 - p_) * eval(std::move(without));
    memo_.emplace(key, value);
    return value;
  }

 private:
  static unsigned pick_pivot(const std::vector<Mask128>& edges) {
    // Most frequent vertex splits fastest; ties go to the smallest index.
    std::array<std::uint16_t, Mask128::capacity> freq{};
    for (const auto& e : edges) e.for_each([&](unsigned v) { ++freq[v]; });
    unsigned best = 0, best_count = 0;
    for (unsigned v = 0; v < Mask128::capacity; ++v)
      if (freq[v] > best_count) {
        best = v;
        best_count = freq[v];
      }
    return best;
  }

  double p_;
  std::size_t budget_;
  std::unordered_map<DnfKey, double, DnfKeyHash> memo_;
};

}  // namespace

std::optional<double> hit_exact_try(const Hypergraph& h, const SubsetDist& dist,
                                    const HitExactGuards& guards) {
  if (dist.n != h.ground_size())
    throw parameter_error("hit: distribution ground set differs from hypergraph");
  if (h.empty()) return 0.0;
  for (const auto& e : h.edges())
    if (e.empty()) return 1.0;

  const std::vector<Mask128> edges = minimal_edges(h);

  if (dist.kind == SubsetDist::Kind::uniform) {
    const double total = binomial(dist.n, dist.k);
    if (total <= guards.max_enumeration &&
        total * static_cast<double>(edges.size()) <= guards.max_enumeration_cost) {
      std::vector<std::uint64_t> lo, hi;
      for (const auto& e : edges) {
        lo.push_back(e.lo);
        hi.push_back(e.hi);
      }
      const auto& kb = kernels::backend();
      std::uint64_t count = 0;
      for_each_k_subset(dist.n, dist.k, [&](const Mask128& s) {
        count += kb.any_contained(lo.data(), hi.data(), lo.size(), s) ? 1 : 0;
      });
      return static_cast<double>(count) / total;
    }
    if (edges.size() <= guards.max_ie_edges) return inclusion_exclusion(edges, dist);
    return std::nullopt;
  }

  if (edges.size() <= guards.max_ie_edges) return inclusion_exclusion(edges, dist);

  Mask128 support;
  for (const auto& e : edges) support = support | e;
  if (support.count() <= guards.max_dnf_vertices) {
    ShannonEvaluator eval(dist.p, guards.max_dnf_nodes);
    try {
      return eval.eval(edges);
    } catch (const exact_infeasible_error&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

double hit_exact(const Hypergraph& h, const SubsetDist& dist, const HitExactGuards& guards) {
  if (auto v = hit_exact_try(h, dist, guards)) return *v;
  throw exact_infeasible_error("hit_exact: instance outside exactness guards; use hit_mc");
}

McEstimate hit_mc(const Hypergraph& h, const SubsetDist& dist, std::uint64_t samples,
                  RandomStream& rng) {
  if (samples < 100) throw parameter_error("hit_mc: need samples >= 100");
  if (dist.n != h.ground_size())
    throw parameter_error("hit: distribution ground set differs from hypergraph");
  McEstimate out;
  out.samples = samples;
  if (h.empty()) {
    out.exact = true;
    return out;
  }

  // Fixed shard count: the stream assignment (and therefore the estimate)
  // does not depend on how many threads actually run.
  constexpr std::uint64_t kShards = 8;
  const RandomStream base = rng.derive("hit_mc");
  auto shard_count = [&](std::uint64_t shard) {
    RandomStream local = base.derive(shard);
    const std::uint64_t begin = samples * shard / kShards;
    const std::uint64_t end = samples * (shard + 1) / kShards;
    std::uint64_t c = 0;
    for (std::uint64_t i = begin; i < end; ++i)
      c += h.hits(dist.sample(local)) ? 1 : 0;
    return c;
  };

  std::uint64_t count = 0;
  const unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(), 4);
  if (workers >= 2 && samples >= 20000) {
    std::vector<std::future<std::uint64_t>> futs;
    futs.reserve(kShards);
    for (std::uint64_t s = 0; s < kShards; ++s)
      futs.push_back(std::async(std::launch::async, shard_count, s));
    for (auto& f : futs) count += f.get();
  } else {
    for (std::uint64_t s = 0; s < kShards; ++s) count += shard_count(s);
  }

  out.estimate = static_cast<double>(count) / static_cast<double>(samples);
  out.ci_halfwidth = wilson_halfwidth(count, samples);
  return out;
}

McEstimate hit_eval(const Hypergraph& h, const SubsetDist& dist, std::uint64_t mc_samples,
                    RandomStream& rng, const HitExactGuards& guards) {
  if (auto v = hit_exact_try(h, dist, guards)) {
    McEstimate out;
    out.estimate = *v;
    out.exact = true;
    return out;
  }
  return hit_mc(h, dist, mc_samples, rng);
}

}  // namespace agl
