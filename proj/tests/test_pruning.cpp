#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "agreelab/combinatorics.hpp"
#include "agreelab/errors.hpp"
#include "agreelab/pruning.hpp"
#include "agreelab/samplers.hpp"

using namespace agl;

namespace {

Hypergraph make(unsigned n, std::vector<std::vector<unsigned>> edges) {
  std::vector<VertexSet> vs;
  for (auto& e : edges) vs.emplace_back(std::move(e));
  return Hypergraph(n, std::move(vs));
}

Hypergraph random_uniform(unsigned n, unsigned d, std::size_t m, RandomStream& rng) {
  std::set<std::string> seen;
  std::vector<VertexSet> edges;
  while (edges.size() < m) {
    VertexSet vs(sample_k_subset_mask(n, d, rng));
    if (seen.insert(vs.to_key()).second) edges.push_back(std::move(vs));
  }
  return Hypergraph(n, std::move(edges));
}

// d=2 star: edges {0,i} for i = 1..leaves.
Hypergraph star(unsigned n, unsigned leaves) {
  std::vector<VertexSet> edges;
  for (unsigned i = 1; i <= leaves; ++i) edges.push_back(VertexSet({0u, i}));
  return Hypergraph(n, std::move(edges));
}

PruneConfig cfg_of(double c, double p) {
  PruneConfig cfg;
  cfg.c = c;
  cfg.p = p;
  return cfg;
}

bool subset_of(const Hypergraph& a, const Hypergraph& b) {
  for (const auto& e : a.edges())
    if (!b.contains_edge(e.mask())) return false;
  return true;
}

}  // namespace

TEST_SUITE("pruning") {
  TEST_CASE("critical_depth trivial branches") {
    RandomStream rng(1);
    const PruneConfig cfg = cfg_of(0.4, 0.1);
    const auto empty =
        critical_depth(Hypergraph(8, {}), cfg, make_hit_oracle(cfg, 8, rng));
    CHECK(empty.pruned);
    CHECK(empty.h_d.empty());

    // single edge, c/p > 1: no B_r is ever populated, H_d = H
    for (double c : {0.15, 0.4}) {
      const PruneConfig one = cfg_of(c, 0.1);
      const Hypergraph h = make(8, {{1, 2, 3}});
      const auto res = critical_depth(h, one, make_hit_oracle(one, 8, rng));
      CHECK(res.pruned);
      CHECK(res.h_d == h);
      for (const auto& b : res.b_seq) CHECK(b.empty());
    }
  }

  TEST_CASE("critical_depth on the d=2 star finds the hub at depth 1") {
    RandomStream rng(2);
    const PruneConfig cfg = cfg_of(0.4, 0.1);  // c/p = 4
    const Hypergraph h = star(40, 10);
    const auto res = critical_depth(h, cfg, make_hit_oracle(cfg, 40, rng));
    REQUIRE(!res.pruned);
    CHECK(res.r == 1);
    CHECK(res.critical_i == make(40, {{0}}));
    CHECK(res.h_prev == h);
    // the hub has 10 >= 4 extensions and hit(B_1) = Pr[0 in S] dominates
    CHECK(h.extensions_of(Mask128::single(0)) == 10);
    const double hit_b1 = hit_exact(res.critical_i, SubsetDist::biased(40, 0.1));
    const double hit_h = hit_exact(h, SubsetDist::biased(40, 0.1));
    CHECK(hit_b1 == doctest::Approx(0.1));
    CHECK(hit_b1 >= hit_h);
    CHECK(hit_h >= hit_h / 3.0);
  }

  TEST_CASE("critical_depth decomposition identity") {
    RandomStream rng(3);
    for (int trial = 0; trial < 8; ++trial) {
      const unsigned d = 2 + trial % 2;
      const Hypergraph h = random_uniform(18, d, 40, rng);
      const PruneConfig cfg = cfg_of(0.3, 0.1);
      const auto res = critical_depth(h, cfg, make_hit_oracle(cfg, 18, rng));
      // edges(H) = edges(H_d) + removed_1 + ... + removed_d, disjointly
      std::set<std::string> covered;
      std::size_t total = 0;
      for (const auto& e : res.h_seq.back().edges()) {
        covered.insert(e.to_key());
        ++total;
      }
      for (const auto& rem : res.removed_seq)
        for (const auto& e : rem.edges()) {
          CHECK(covered.insert(e.to_key()).second);  // disjoint
          ++total;
        }
      CHECK(total == h.edge_count());
      for (const auto& e : h.edges()) CHECK(covered.count(e.to_key()) == 1);
    }
  }

  TEST_CASE("critical_depth ladder guarantee: extension caps on every H_r") {
    RandomStream rng(4);
    for (int trial = 0; trial < 6; ++trial) {
      const unsigned d = 2 + trial % 2;
      const Hypergraph h = random_uniform(16, d, 30, rng);
      const PruneConfig cfg = cfg_of(0.25, 0.1);
      const double ratio = cfg.rho();
      const auto res = critical_depth(h, cfg, make_hit_oracle(cfg, 16, rng));
      for (unsigned r = 0; r < res.h_seq.size(); ++r) {
        const Hypergraph& hr = res.h_seq[r];
        // every A of size >= d-r has at most (c/p)^{d-|A|} extensions in H_r
        if (r == d)
          CHECK(static_cast<double>(hr.edge_count()) <= std::pow(ratio, d) + 1e-9);
        std::set<std::string> checked;
        for (const auto& e : hr.edges()) {
          std::vector<unsigned> mem(e.members().begin(), e.members().end());
          for (unsigned sz = std::max(1u, d >= r ? d - r : 1u); sz <= d; ++sz) {
            for_each_k_subset_of(mem, sz, [&](const Mask128& a) {
              if (!checked.insert(VertexSet(a).to_key()).second) return;
              CHECK(static_cast<double>(hr.extensions_of(a)) <=
                    std::pow(ratio, d - sz) + 1e-9);
            });
          }
        }
      }
    }
  }

  TEST_CASE("ladder hit mass decomposes: hit(H) <= sum hit(B_r) + hit(H_d)") {
    RandomStream rng(15);
    for (int trial = 0; trial < 10; ++trial) {
      const unsigned d = 1 + trial % 3;
      const std::size_t m =
          std::min<std::size_t>(6 + (trial % 4) * 4, d == 1 ? 12 : 30);
      const Hypergraph h = random_uniform(14, d, m, rng);
      const PruneConfig cfg = cfg_of(0.3 + 0.1 * (trial % 3), 0.1);
      const auto res = critical_depth(h, cfg, make_hit_oracle(cfg, 14, rng));
      const SubsetDist dist = SubsetDist::biased(14, cfg.p);
      const double hit_h = hit_exact(h, dist);
      double rhs = hit_exact(res.h_seq.back(), dist);
      double best = rhs;
      for (const auto& b : res.b_seq) {
        const double hb = b.empty() ? 0.0 : hit_exact(b, dist);
        rhs += hb;
        best = std::max(best, hb);
      }
      CHECK(hit_h <= rhs + 1e-9);
      // hence some candidate carries at least hit(H)/(d+1)
      CHECK(best >= hit_h / static_cast<double>(d + 1) - 1e-9);
    }
  }

  TEST_CASE("complete_multi examples") {
    const PruneConfig cfg = cfg_of(0.4, 0.1);
    // one I-edge: nothing can extend two
    CHECK(complete_multi(make(6, {{1, 2, 3}}), make(6, {{1}}), cfg).empty());
    CHECK(complete_multi(make(6, {{1, 2, 3}}), make(6, {{1}, {2}}), cfg) ==
          make(6, {{1, 2, 3}}));
    CHECK(complete_multi(make(6, {{1, 2}, {3, 4}}), make(6, {{1}, {3}}), cfg).empty());
  }

  TEST_CASE("complete_fill takes the lexicographically least extensions") {
    // floor(c/p) = 4 forces exactly four fills at the hub
    PruneConfig cfg = cfg_of(0.4, 0.1);
    std::vector<std::vector<unsigned>> prev;
    for (unsigned j = 2; j <= 9; ++j) prev.push_back({1, j});
    const Hypergraph k = complete_fill(make(10, std::move(prev)), make(10, {{1}}),
                                       Hypergraph(10, {}), cfg);
    CHECK(k == make(10, {{1, 2}, {1, 3}, {1, 4}, {1, 5}}));
  }

  TEST_CASE("complete_fill with a rich K_multi adds nothing") {
    const PruneConfig cfg = cfg_of(0.1, 0.1);  // floor(c/p) = 1
    const Hypergraph prev = make(6, {{1, 2}});
    const Hypergraph i = make(6, {{1}, {2}});
    const Hypergraph multi = complete_multi(prev, i, cfg);
    CHECK(multi == prev);
    CHECK(complete_fill(prev, i, multi, cfg) == multi);
  }

  TEST_CASE("complete_fill reports the deficient edge on violated floors") {
    const PruneConfig cfg = cfg_of(0.4, 0.1);
    CHECK_THROWS_AS(
        complete_fill(make(6, {{1, 2}}), make(6, {{1}}), Hypergraph(6, {}), cfg),
        structural_error);
  }

  TEST_CASE("completion of a critical decomposition stays within 2^{d+1} c/p") {
    RandomStream rng(5);
    int exercised = 0;
    for (int trial = 0; trial < 14; ++trial) {
      const unsigned d = 2 + trial % 2;
      const Hypergraph h = random_uniform(20, d, 60, rng);
      const PruneConfig cfg = cfg_of(0.5, 0.1);  // c/p = 5
      const auto res = critical_depth(h, cfg, make_hit_oracle(cfg, 20, rng));
      if (res.pruned) continue;
      ++exercised;
      RandomStream rec(100 + trial);
      const Hypergraph i_pruned = prune_biased(res.critical_i, cfg, rec);
      if (i_pruned.empty()) continue;
      CHECK_NOTHROW(validate_completion_preconditions(res.h_prev, i_pruned, cfg));
      const Hypergraph multi = complete_multi(res.h_prev, i_pruned, cfg);
      const Hypergraph k = complete_fill(res.h_prev, i_pruned, multi, cfg);
      CHECK(check_branching(k, std::ldexp(cfg.rho(), static_cast<int>(d) + 1)).ok);
      CHECK(subset_of(k, h));
    }
    CHECK(exercised >= 3);  // the instance family must actually hit the critical branch
  }

  TEST_CASE("first_qualifying selection is deterministic and keeps the guarantees") {
    RandomStream rng(14);
    for (int trial = 0; trial < 5; ++trial) {
      const Hypergraph h = random_uniform(20, 2, 60, rng);
      PruneConfig cfg = cfg_of(0.6, 0.1);
      cfg.selection = PruneConfig::Selection::first_qualifying;
      RandomStream r1(500 + trial), r2(500 + trial);
      const Hypergraph a = prune_biased(h, cfg, r1);
      const Hypergraph b = prune_biased(h, cfg, r2);
      CHECK(a == b);
      CHECK(subset_of(a, h));
      CHECK(check_branching(a, cfg.rho()).ok);
      CHECK(!a.empty());
    }
  }

  TEST_CASE("prune_biased trivial cases") {
    RandomStream rng(6);
    const PruneConfig cfg = cfg_of(0.4, 0.1);
    CHECK(prune_biased(Hypergraph(8, {}), cfg, rng).empty());
    const Hypergraph one = make(8, {{1, 2}});
    CHECK(prune_biased(one, cfg, rng) == one);
  }

  TEST_CASE("prune_biased hard postconditions on random instances") {
    RandomStream rng(7);
    for (int trial = 0; trial < 12; ++trial) {
      const unsigned d = 1 + trial % 3;
      const unsigned n = 16 + (trial % 3) * 8;
      const std::size_t m = d == 1 ? 10 : 60;
      const Hypergraph h = random_uniform(n, d, m, rng);
      PruneConfig cfg = cfg_of(d == 3 ? 0.45 : 0.6, d == 3 ? 0.05 : 0.1);
      RandomStream prng(1000 + trial);
      PruneAudit audit;
      const Hypergraph pruned = prune_biased(h, cfg, prng, &audit);
      CHECK(subset_of(pruned, h));
      CHECK(check_branching(pruned, cfg.rho()).ok);
      CHECK(audit.shrink_m >= 2.0);
      CHECK(!pruned.empty());
    }
  }

  TEST_CASE("prune_biased star keeps a nonempty bounded sub-star") {
    RandomStream rng(8);
    const Hypergraph h = star(40, 10);
    const PruneConfig cfg = cfg_of(0.4, 0.1);
    const Hypergraph out = prune_biased(h, cfg, rng);
    CHECK(!out.empty());
    CHECK(subset_of(out, h));
    CHECK(check_branching(out, 4.0).ok);
    // the completion keeps floor(gamma/p) = 2 lexicographically-least leaves
    CHECK(out == make(40, {{0, 1}, {0, 2}}));
  }

  TEST_CASE("verify_unique_hit examples") {
    RandomStream rng(9);
    const Hypergraph solo = make(10, {{1, 2}});
    CHECK(verify_unique_hit(solo, VertexSet({1, 2}), SubsetDist::uniform(10, 4), true, 0, rng)
              .estimate == 1.0);

    const Hypergraph two = make(10, {{1}, {2}});
    const auto exact =
        verify_unique_hit(two, VertexSet({1}), SubsetDist::uniform(10, 2), true, 0, rng);
    CHECK(exact.estimate == doctest::Approx(8.0 / 9.0));

    const auto mc =
        verify_unique_hit(two, VertexSet({1}), SubsetDist::uniform(10, 2), false, 100000, rng);
    const double sigma = std::sqrt((8.0 / 9.0) * (1.0 / 9.0) / 100000.0);
    CHECK(std::abs(mc.estimate - 8.0 / 9.0) <= 3.0 * sigma);

    // an edge nested inside e is always co-induced
    const Hypergraph nested(10, {VertexSet({1, 2}), VertexSet({1})});
    CHECK(verify_unique_hit(nested, VertexSet({1, 2}), SubsetDist::biased(10, 0.3), true, 0, rng)
              .estimate == 0.0);

    CHECK_THROWS_AS(
        verify_unique_hit(two, VertexSet({3}), SubsetDist::uniform(10, 2), true, 0, rng),
        parameter_error);
  }

  TEST_CASE("prune_uniform star meets the unique-hit slack") {
    RandomStream rng(10);
    const Hypergraph h = star(40, 10);
    std::vector<std::string> warnings;
    const Hypergraph out = prune_uniform(h, 40, 4, 0.25, rng, std::nullopt, nullptr, &warnings);
    CHECK(!out.empty());
    CHECK(warnings.empty());  // k/n = 0.1 sits under the default guard
    for (const auto& e : out.edges()) {
      RandomStream vrng(11);
      const auto uh = verify_unique_hit(out, e, SubsetDist::uniform(40, 4), true, 0, vrng);
      CHECK(uh.estimate >= 0.75);
    }
  }

  TEST_CASE("prune_uniform parameter handling") {
    RandomStream rng(11);
    const Hypergraph h = star(20, 6);
    CHECK_THROWS_AS(prune_uniform(h, 20, 3, 0.25, rng), parameter_error);  // k < 2d
    CHECK_THROWS_AS(prune_uniform(h, 19, 4, 0.25, rng), parameter_error);  // n mismatch
    std::vector<std::string> warnings;
    (void)prune_uniform(h, 20, 4, 0.25, rng, std::nullopt, nullptr, &warnings);
    CHECK(warnings.size() == 1);  // k/n = 0.2 above the p0 guard
    CHECK(prune_uniform(Hypergraph(20, {}), 20, 4, 0.25, rng).empty());

    const Hypergraph one = make(20, {{1, 2}});
    std::vector<std::string> w2;
    CHECK(prune_uniform(one, 20, 6, 0.25, rng, std::nullopt, nullptr, &w2) == one);
  }

  TEST_CASE("pruned random instances keep unique-hit above 1 - epsilon") {
    RandomStream rng(12);
    for (int trial = 0; trial < 6; ++trial) {
      const unsigned d = 1 + trial % 2;
      const Hypergraph h = random_uniform(40, d, d == 1 ? 12 : 80, rng);
      RandomStream prng(2000 + trial);
      const Hypergraph out = prune_uniform(h, 40, 4, 0.25, prng);
      CHECK(!out.empty());
      for (const auto& e : out.edges()) {
        RandomStream vrng(13);
        const auto uh = verify_unique_hit(out, e, SubsetDist::uniform(40, 4), true, 0, vrng);
        CHECK(uh.estimate >= 0.75);
      }
    }
  }
}
