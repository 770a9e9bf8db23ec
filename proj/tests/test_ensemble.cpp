#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "agreelab/ensemble.hpp"
#include "agreelab/errors.hpp"
#include "agreelab/samplers.hpp"

using namespace agl;

namespace {

LocalEnsemble global_ensemble(unsigned n, unsigned k, unsigned d, unsigned sigma,
                              std::uint64_t seed, bool include_empty = false) {
  RandomStream rng(seed);
  return LocalEnsemble::from_global(GlobalFunction::random(n, d, sigma, include_empty, rng), k);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("from_global restricts the global function everywhere") {
    const LocalEnsemble e = global_ensemble(20, 6, 2, 3, 101);
    const GlobalFunction& f = e.global();
    RandomStream rng(5);
    for (int probe = 0; probe < 100; ++probe) {
      const Mask128 s = sample_k_subset_mask(20, 6, rng);
      const auto local = e.materialize_local(VertexSet(s));
      for (std::size_t i = 0; i < local.points.size(); ++i)
        CHECK(local.values[i] == f.eval(local.points[i]));
    }
    CHECK_THROWS_AS(e.materialize_local(VertexSet({1, 2})), parameter_error);
  }

  TEST_CASE("materialize_local is deterministic") {
    RandomStream corrupt_rng(7);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::replace_set;
    spec.rate = 0.5;
    const LocalEnsemble e = global_ensemble(20, 6, 2, 3, 11).corrupted(spec, corrupt_rng);
    RandomStream rng(6);
    for (int probe = 0; probe < 50; ++probe) {
      const VertexSet s(sample_k_subset_mask(20, 6, rng));
      CHECK(e.materialize_local(s) == e.materialize_local(s));
    }
  }

  TEST_CASE("rate zero leaves the ensemble unchanged") {
    const LocalEnsemble base = global_ensemble(16, 5, 2, 4, 21);
    RandomStream rng(8);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::flip_entry;
    spec.rate = 0.0;
    const LocalEnsemble noisy = base.corrupted(spec, rng);
    RandomStream probes(9);
    for (int probe = 0; probe < 60; ++probe) {
      const VertexSet s(sample_k_subset_mask(16, 5, probes));
      CHECK(base.materialize_local(s) == noisy.materialize_local(s));
    }
  }

  TEST_CASE("replace_set corruption rate matches its nominal value at 3 sigma") {
    // n=60, k=10, d=1, rate 0.05: fraction of S with f_S != F|_S
    const LocalEnsemble base = global_ensemble(60, 10, 1, 2, 31);
    RandomStream rng(10);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::replace_set;
    spec.rate = 0.05;
    const LocalEnsemble noisy = base.corrupted(spec, rng);
    const GlobalFunction& f = base.global();
    RandomStream probes(11);
    const int draws = 10000;
    int differs = 0;
    for (int i = 0; i < draws; ++i) {
      const Mask128 s = sample_k_subset_mask(60, 10, probes);
      bool diff = false;
      for_each_small_subset(s, 1, false, [&](const Mask128& a) {
        diff = diff || noisy.eval(s, a) != f.eval(a);
      });
      differs += diff;
    }
    // a replaced table of 10 binary values survives unchanged w.p. 2^-10
    const double expect = 0.05 * (1.0 - std::pow(0.5, 10));
    const double sigma = std::sqrt(expect * (1 - expect) / draws);
    CHECK(std::abs(differs / static_cast<double>(draws) - expect) <= 3.0 * sigma);
  }

  TEST_CASE("replace_set at rate one randomizes every table") {
    const LocalEnsemble base = global_ensemble(30, 6, 1, 2, 41);
    RandomStream rng(12);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::replace_set;
    spec.rate = 1.0;
    const LocalEnsemble noisy = base.corrupted(spec, rng);
    RandomStream probes(13);
    int equal = 0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
      const VertexSet s(sample_k_subset_mask(30, 6, probes));
      equal += noisy.materialize_local(s).values == base.materialize_local(s).values;
    }
    // agreement with F per table is 2^-6; 3 sigma around that
    const double expect = draws * std::pow(0.5, 6);
    CHECK(std::abs(equal - expect) <= 3.0 * std::sqrt(expect));
  }

  TEST_CASE("flip_entry flips single entries at the nominal rate") {
    const LocalEnsemble base = global_ensemble(24, 6, 2, 4, 51);
    RandomStream rng(14);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::flip_entry;
    spec.rate = 0.2;
    const LocalEnsemble noisy = base.corrupted(spec, rng);
    const GlobalFunction& f = base.global();
    RandomStream probes(15);
    std::uint64_t flips = 0, entries = 0;
    for (int i = 0; i < 400; ++i) {
      const Mask128 s = sample_k_subset_mask(24, 6, probes);
      for_each_small_subset(s, 2, false, [&](const Mask128& a) {
        ++entries;
        flips += noisy.eval(s, a) != f.eval(a);
      });
    }
    const double rate = static_cast<double>(flips) / static_cast<double>(entries);
    // entries repeat across samples; the bound is loose on purpose
    CHECK(std::abs(rate - 0.2) < 0.02);
  }

  TEST_CASE("planted disagreement only touches the designated sets") {
    const LocalEnsemble base = global_ensemble(20, 5, 2, 2, 61);
    RandomStream rng(16);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::planted_disagreement;
    spec.rate = 0.7;
    spec.planted = {VertexSet({2, 3}), VertexSet({7, 9})};
    const LocalEnsemble noisy = base.corrupted(spec, rng);
    const GlobalFunction& f = base.global();
    RandomStream probes(17);
    std::uint64_t planted_flips = 0, planted_seen = 0;
    for (int i = 0; i < 3000; ++i) {
      const Mask128 s = sample_k_subset_mask(20, 5, probes);
      for_each_small_subset(s, 2, false, [&](const Mask128& a) {
        const bool designated =
            a == spec.planted[0].mask() || a == spec.planted[1].mask();
        const bool flipped = noisy.eval(s, a) != f.eval(a);
        if (designated) {
          ++planted_seen;
          planted_flips += flipped;
        } else {
          CHECK(!flipped);
        }
      });
    }
    CHECK(planted_seen > 50);
    const double rate = static_cast<double>(planted_flips) / static_cast<double>(planted_seen);
    CHECK(std::abs(rate - 0.7) < 0.1);
  }

  TEST_CASE("corrupting twice is rejected for implicit ensembles") {
    RandomStream rng(18);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::replace_set;
    spec.rate = 0.1;
    const LocalEnsemble once = global_ensemble(16, 5, 1, 2, 71).corrupted(spec, rng);
    CHECK_THROWS_AS(once.corrupted(spec, rng), parameter_error);
  }

  TEST_CASE("corruption spec validation") {
    CorruptionSpec bad;
    bad.mode = CorruptionSpec::Mode::flip_entry;
    bad.rate = 1.5;
    CHECK_THROWS_AS(bad.validate(2), parameter_error);
    CorruptionSpec planted;
    planted.mode = CorruptionSpec::Mode::planted_disagreement;
    planted.rate = 0.3;
    CHECK_THROWS_AS(planted.validate(2), parameter_error);  // needs D
    planted.planted = {VertexSet({1, 2, 3})};
    CHECK_THROWS_AS(planted.validate(2), parameter_error);  // |A| > d
  }

  TEST_CASE("explicit materialization matches the implicit ensemble") {
    RandomStream rng(19);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::flip_entry;
    spec.rate = 0.3;
    const LocalEnsemble imp = global_ensemble(10, 4, 2, 3, 81).corrupted(spec, rng);
    const LocalEnsemble exp = imp.materialize_explicit();
    CHECK(exp.backing() == LocalEnsemble::Backing::explicit_tables);
    CHECK(exp.tables().size() == 210);  // C(10,4)
    RandomStream probes(20);
    for (int i = 0; i < 50; ++i) {
      const VertexSet s(sample_k_subset_mask(10, 4, probes));
      CHECK(imp.materialize_local(s) == exp.materialize_local(s));
    }
    CHECK_THROWS_AS(global_ensemble(40, 10, 2, 2, 1).materialize_explicit(),
                    exact_infeasible_error);
  }

  TEST_CASE("save/load round trip preserves every probe") {
    RandomStream rng(21);
    CorruptionSpec spec;
    spec.mode = CorruptionSpec::Mode::planted_disagreement;
    spec.rate = 0.4;
    spec.planted = {VertexSet({1, 2})};
    const LocalEnsemble e = global_ensemble(14, 5, 2, 3, 91).corrupted(spec, rng);
    const std::string path = temp_path("agl_ensemble_rt.json");
    e.save(path);
    const LocalEnsemble loaded = LocalEnsemble::load(path);
    CHECK(loaded.params().n == 14);
    CHECK(loaded.corruption().rate == doctest::Approx(0.4));
    RandomStream probes(22);
    for (int i = 0; i < 60; ++i) {
      const VertexSet s(sample_k_subset_mask(14, 5, probes));
      CHECK(e.materialize_local(s) == loaded.materialize_local(s));
    }
    // serialization is byte-stable
    CHECK(e.to_json() == loaded.to_json());
    std::remove(path.c_str());
  }

  TEST_CASE("explicit round trip and truncation errors") {
    const LocalEnsemble exp = global_ensemble(8, 3, 1, 2, 95).materialize_explicit();
    const std::string text = exp.to_json();
    const LocalEnsemble back = LocalEnsemble::from_json(text);
    CHECK(back.to_json() == text);
    CHECK_THROWS_AS(LocalEnsemble::from_json(text.substr(0, text.size() / 2)), parse_error);
    CHECK_THROWS_AS(LocalEnsemble::from_json("{}"), parse_error);
  }

  TEST_CASE("explicit backing rejects evaluation at unstored sets") {
    const LocalEnsemble exp = global_ensemble(8, 3, 1, 2, 98).materialize_explicit();
    // stored sets evaluate; an off-size set has no table
    CHECK_NOTHROW(exp.eval(VertexSet({0, 1, 2}).mask(), VertexSet({1}).mask()));
    CHECK_THROWS_AS(exp.eval(VertexSet({0, 1}).mask(), VertexSet({1}).mask()),
                    structural_error);
  }

  TEST_CASE("dense rank lookup matches the key map on every domain point") {
    for (unsigned n : {5u, 9u, 20u}) {
      RandomStream rng(300 + n);
      const GlobalFunction f = GlobalFunction::random(n, std::min(3u, n), 5, true, rng);
      for (const auto& [a, sym] : f.values()) CHECK(f.eval(a) == sym);
    }
    // d >= 4 falls back to the key map
    RandomStream rng(301);
    const GlobalFunction g = GlobalFunction::random(8, 4, 3, false, rng);
    for (const auto& [a, sym] : g.values()) CHECK(g.eval(a) == sym);
    CHECK_THROWS_AS(g.eval(VertexSet({0, 1, 2, 3, 4}).mask()), structural_error);
  }

  TEST_CASE("include_empty adds the constant point to every domain") {
    const LocalEnsemble e = global_ensemble(10, 4, 2, 2, 97, true);
    const auto local = e.materialize_local(VertexSet({0, 3, 5, 7}));
    CHECK(local.points.front().empty());
    CHECK(local.points.size() == 1 + 4 + 6);
  }
}
