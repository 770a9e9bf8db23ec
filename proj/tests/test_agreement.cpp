#include <doctest.h>

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "agreelab/agreement.hpp"
#include "agreelab/combinatorics.hpp"
#include "agreelab/errors.hpp"
#include "agreelab/samplers.hpp"

using namespace agl;

namespace {

LocalEnsemble global_ensemble(unsigned n, unsigned k, unsigned d, unsigned sigma,
                              std::uint64_t seed) {
  RandomStream rng(seed);
  return LocalEnsemble::from_global(GlobalFunction::random(n, d, sigma, false, rng), k);
}

LocalEnsemble corrupted(LocalEnsemble base, CorruptionSpec::Mode mode, double rate,
                        std::uint64_t seed) {
  RandomStream rng(seed);
  CorruptionSpec spec;
  spec.mode = mode;
  spec.rate = rate;
  return base.corrupted(spec, rng);
}

// Independent oracle: nu_{n,k,t} is uniform over ordered pairs of k-sets
// with intersection exactly t, so average the disagreement indicator over
// all such pairs directly, with no reference to the sampler construction.
double eps_by_pair_enumeration(const LocalEnsemble& e, unsigned t) {
  const auto& p = e.params();
  std::uint64_t pairs = 0, bad = 0;
  for_each_k_subset(p.n, p.k, [&](const Mask128& s1) {
    for_each_k_subset(p.n, p.k, [&](const Mask128& s2) {
      if ((s1 & s2).count() != t) return;
      ++pairs;
      bad += pair_agrees(e, s1, s2) ? 0 : 1;
    });
  });
  return static_cast<double>(bad) / static_cast<double>(pairs);
}

}  // namespace

TEST_SUITE("agreement") {
  TEST_CASE("agree_check basics") {
    const LocalEnsemble e = global_ensemble(12, 4, 2, 3, 1);
    const auto f1 = e.materialize_local(VertexSet({0, 1, 2, 3}));
    CHECK(agree_check(f1, f1, 2));

    const auto f2 = e.materialize_local(VertexSet({4, 5, 6, 7}));
    CHECK(agree_check(f1, f2, 2));  // disjoint domains: vacuous

    // equal on singletons of the intersection, different on one pair
    LocalFunction g1 = e.materialize_local(VertexSet({0, 1, 2, 3}));
    LocalFunction g2 = e.materialize_local(VertexSet({0, 1, 4, 5}));
    for (std::size_t i = 0; i < g2.points.size(); ++i)
      if (g2.points[i] == VertexSet({0, 1}).mask())
        g2.values[i] = static_cast<std::uint16_t>((g2.values[i] + 1) % 3);
    CHECK(!agree_check(g1, g2, 2));
    CHECK(!agree_check(g2, g1, 2));  // symmetric
    CHECK(agree_check(g1, g2, 1));   // monotone in d: singletons still agree
  }

  TEST_CASE("global ensembles have zero disagreement under every distribution") {
    const LocalEnsemble e = global_ensemble(20, 6, 2, 4, 2);
    RandomStream rng(3);
    const auto nu = agreement_estimate(e, NuDist{3}, 4000, rng);
    CHECK(nu.epsilon_hat == 0.0);
    const auto mu = agreement_estimate(e, MuPQDist{0.3, 0.5}, 4000, rng);
    CHECK(mu.epsilon_hat == 0.0);
    const auto exact = agreement_exact(global_ensemble(8, 3, 1, 2, 4), 1);
    CHECK(exact.epsilon_hat == 0.0);
    CHECK(exact.exact);
  }

  TEST_CASE("agreement_exact equals independent pair enumeration") {
    // single corrupted table on a tiny instance
    LocalEnsemble e = global_ensemble(6, 3, 1, 2, 5).materialize_explicit();
    LocalFunction f = e.materialize_local(VertexSet({0, 1, 2}));
    for (auto& v : f.values) v = static_cast<std::uint16_t>(1 - v);
    e.set_local(f);

    const double oracle = eps_by_pair_enumeration(e, 1);
    const auto report = agreement_exact(e, 1);
    CHECK(report.epsilon_hat == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle > 0.0);

    // a second instance with hash corruption rather than a planted table
    const LocalEnsemble e2 =
        corrupted(global_ensemble(7, 3, 2, 2, 6), CorruptionSpec::Mode::flip_entry, 0.35, 7);
    CHECK(agreement_exact(e2, 2).epsilon_hat ==
          doctest::Approx(eps_by_pair_enumeration(e2, 2)).epsilon(1e-12));
  }

  TEST_CASE("MC agreement matches exact within 3 sigma") {
    const LocalEnsemble e =
        corrupted(global_ensemble(10, 4, 1, 2, 8), CorruptionSpec::Mode::replace_set, 0.2, 9);
    const double exact = agreement_exact(e, 2).epsilon_hat;
    RandomStream rng(10);
    const auto mc = agreement_estimate(e, NuDist{2}, 100000, rng);
    const double sigma = std::sqrt(exact * (1 - exact) / 100000.0);
    CHECK(std::abs(mc.epsilon_hat - exact) <= 3.0 * sigma);
  }

  TEST_CASE("replace_set disagreement lands between the union and single-side bounds") {
    // a pair fails when either side is corrupted (union bound 2*rate) and at
    // least when exactly one side is corrupted and the random table misses
    const double rate = 0.2;
    const LocalEnsemble e =
        corrupted(global_ensemble(10, 4, 1, 2, 25), CorruptionSpec::Mode::replace_set, rate, 26);
    const double eps = agreement_exact(e, 2).epsilon_hat;
    CHECK(eps <= 2.0 * rate + 0.05);
    const double collision = 0.25;  // two shared binary points can agree by luck
    CHECK(eps >= rate * (1.0 - rate) * (1.0 - collision) * 0.8);
  }

  TEST_CASE("flip_entry at one half behaves like fresh random entries") {
    // binary alphabet, each entry flipped with probability 1/2: every shared
    // point disagrees w.p. 1/2, so pair agreement is 2^-t on average
    const LocalEnsemble e =
        corrupted(global_ensemble(10, 4, 1, 2, 11), CorruptionSpec::Mode::flip_entry, 0.5, 12);
    const auto report = agreement_exact(e, 2);
    const double agreement = 1.0 - report.epsilon_hat;
    CHECK(std::abs(agreement - 0.25) < 0.015);
  }

  TEST_CASE("per-size breakdown masses sum to epsilon") {
    const LocalEnsemble e =
        corrupted(global_ensemble(9, 4, 1, 2, 13), CorruptionSpec::Mode::flip_entry, 0.3, 14);
    const auto report = agreement_exact(e, 2);
    double sum = 0.0;
    for (const auto& [j, mass] : report.per_size_breakdown) {
      CHECK(j >= 1);
      CHECK(j <= 2);
      sum += mass;
    }
    CHECK(sum == doctest::Approx(report.epsilon_hat).epsilon(1e-12));
  }

  TEST_CASE("conditional quantities vanish on global ensembles") {
    const LocalEnsemble e = global_ensemble(10, 4, 1, 2, 15);
    RandomStream rng(16);
    CHECK(conditional_disagreement(e, VertexSet({3}), std::nullopt, 2, 500, rng).estimate == 0.0);
    CHECK(conditional_disagreement(e, VertexSet({3}), VertexSet({5}), 2, 500, rng).estimate ==
          0.0);
    CHECK(conditional_disagreement_exact(e, VertexSet({3}), std::nullopt, 2).estimate == 0.0);
  }

  TEST_CASE("dimension-one conditional decomposition identities hold exactly") {
    // n=8, k=4, t=2, d=1, flip_entry: the exact enumeration identities
    //   E_T[eps_T(empty)] = (1 - 1/t) eps_1 + sum_{j>1} eps_j
    //   E_{T,i}[eps_T(i)] = eps_1 / t
    const LocalEnsemble e =
        corrupted(global_ensemble(8, 4, 1, 2, 17), CorruptionSpec::Mode::flip_entry, 0.3, 18);
    const unsigned t = 2;
    const auto report = agreement_exact(e, t);
    const double eps = report.epsilon_hat;
    double eps1 = 0.0, eps_rest = 0.0;
    for (const auto& [j, mass] : report.per_size_breakdown)
      (j == 1 ? eps1 : eps_rest) += mass;

    double sum_empty = 0.0, count_empty = 0.0;
    double sum_i = 0.0, count_i = 0.0;
    for (unsigned v = 0; v < 8; ++v) {
      const VertexSet tset({v});
      sum_empty += conditional_disagreement_exact(e, tset, std::nullopt, t).estimate;
      count_empty += 1.0;
      for (unsigned i = 0; i < 8; ++i) {
        if (i == v) continue;
        sum_i += conditional_disagreement_exact(e, tset, VertexSet({i}), t).estimate;
        count_i += 1.0;
      }
    }
    const double mean_empty = sum_empty / count_empty;
    const double mean_i = sum_i / count_i;

    CHECK(mean_empty == doctest::Approx((1.0 - 1.0 / t) * eps1 + eps_rest).epsilon(1e-10));
    CHECK(mean_i == doctest::Approx(eps1 / t).epsilon(1e-10));
    CHECK(mean_empty <= eps + 1e-12);
    CHECK(eps > 0.0);
  }

  TEST_CASE("generalized conditional quantity matches brute force at d=2") {
    // Independent evaluation: enumerate every ordered pair with intersection
    // exactly t containing T ∪ A, recompute both frame predicates from
    // materialized point lists.
    const LocalEnsemble e =
        corrupted(global_ensemble(8, 4, 2, 2, 27), CorruptionSpec::Mode::flip_entry, 0.3, 28);
    const unsigned t = 4;
    for (const auto& [tv, av] : std::vector<std::pair<VertexSet, VertexSet>>{
             {VertexSet({1, 2}), VertexSet({5})},
             {VertexSet({0, 3}), VertexSet({4, 6})},
             {VertexSet({2, 5}), VertexSet({0})}}) {
      const Mask128 anchor = tv.mask() | av.mask();
      const unsigned i = av.size();
      std::uint64_t pairs = 0, hits = 0;
      for_each_k_subset(8, 4, [&](const Mask128& s1) {
        for_each_k_subset(8, 4, [&](const Mask128& s2) {
          const Mask128 shared = s1 & s2;
          if (shared.count() != t || !anchor.subset_of(shared)) return;
          ++pairs;
          bool prev_ok = true, a_diff = false;
          for (const Mask128& u : small_subsets(shared, 2, false)) {
            const bool differ = e.eval(s1, u) != e.eval(s2, u);
            if ((u - tv.mask()).count() + 1 <= i && differ) prev_ok = false;
            if ((u - tv.mask()).subset_of(av.mask()) && differ) a_diff = true;
          }
          hits += (prev_ok && a_diff) ? 1 : 0;
        });
      });
      const double oracle = static_cast<double>(hits) / static_cast<double>(pairs);
      const auto lib = conditional_disagreement_exact(e, tv, av, t);
      CHECK(lib.estimate == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(lib.samples == pairs);
    }
  }

  TEST_CASE("conditional MC matches exact within 3 sigma") {
    const LocalEnsemble e =
        corrupted(global_ensemble(8, 4, 1, 2, 19), CorruptionSpec::Mode::flip_entry, 0.4, 20);
    const VertexSet tset({2});
    const double exact =
        conditional_disagreement_exact(e, tset, std::nullopt, 2).estimate;
    RandomStream rng(21);
    const auto mc = conditional_disagreement(e, tset, std::nullopt, 2, 50000, rng);
    const double sigma = std::sqrt(exact * (1 - exact) / 50000.0);
    CHECK(std::abs(mc.estimate - exact) <= 3.0 * sigma);
  }

  TEST_CASE("conditional parameter validation") {
    const LocalEnsemble e = global_ensemble(10, 4, 2, 2, 22);
    RandomStream rng(23);
    CHECK_THROWS_AS(
        conditional_disagreement(e, VertexSet({1}), VertexSet({1}), 3, 100, rng),
        parameter_error);  // A not disjoint
    CHECK_THROWS_AS(
        conditional_disagreement(e, VertexSet({1, 2, 3}), VertexSet({4}), 3, 100, rng),
        parameter_error);  // |T ∪ A| > t
    CHECK_THROWS_AS(
        conditional_disagreement(e, VertexSet({1}), VertexSet({2, 3, 4}), 4, 100, rng),
        parameter_error);  // |A| > d
  }

  TEST_CASE("agreement_exact guards its enumeration budget") {
    const LocalEnsemble e = global_ensemble(40, 10, 1, 2, 24);
    CHECK_THROWS_AS(agreement_exact(e, 5), exact_infeasible_error);
  }
}
