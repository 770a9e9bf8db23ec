#include "agreelab/decode.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "agreelab/errors.hpp"
#include "agreelab/samplers.hpp"

namespace agl {

namespace {

std::uint16_t argmax_vote(const std::vector<std::uint64_t>& votes,
                          const std::optional<std::uint64_t>& tie_seed, const Mask128& a) {
  std::uint64_t best = 0;
  for (auto v : votes) best = std::max(best, v);
  if (!tie_seed) {
    for (std::uint16_t s = 0; s < votes.size(); ++s)
      if (votes[s] == best) return s;
  }
  std::vector<std::uint16_t> tied;
  for (std::uint16_t s = 0; s < votes.size(); ++s)
    if (votes[s] == best) tied.push_back(s);
  if (tied.size() == 1) return tied[0];
  const std::uint64_t h = keyed_set_hash(*tie_seed, a, 0x7135EEDull);
  return tied[h % tied.size()];
}

void check_global_matches(const LocalEnsemble& e, const GlobalFunction& g) {
  const auto& p = e.params();
  if (g.n() != p.n || g.d() != p.d || g.alphabet_size() != p.alphabet_size ||
      g.include_empty() != p.include_empty)
    throw parameter_error("global function shape does not match ensemble");
}

}  // namespace

GlobalFunction plurality_decode(const LocalEnsemble& e, const PluralityOptions& opt,
                                RandomStream& rng) {
  const auto& p = e.params();
  if (opt.votes.kind == VoteDist::Kind::biased && !(opt.votes.p > 0.0 && opt.votes.p < 1.0))
    throw parameter_error("plurality_decode: biased vote distribution needs p in (0,1)");
  if (opt.exact && opt.votes.kind == VoteDist::Kind::biased)
    throw parameter_error("plurality_decode: exact mode enumerates uniform k-supersets only");
  if (!opt.exact && opt.samples_per_a == 0)
    throw parameter_error("plurality_decode: need samples_per_a >= 1");

  if (opt.exact) {
    double cost = 0.0;
    for (unsigned sz = p.include_empty ? 0u : 1u; sz <= p.d; ++sz)
      cost += binomial(p.n, sz) * binomial(p.n - sz, p.k - sz);
    if (cost > opt.max_exact_cost)
      throw exact_infeasible_error("plurality_decode: exact enumeration over budget; use mc mode");
  }

  const RandomStream base = rng.derive("plurality");
  std::unordered_map<Mask128, std::uint16_t, Mask128Hash> values;
  std::uint64_t a_index = 0;
  for_each_small_subset(Mask128::full(p.n), p.d, p.include_empty, [&](const Mask128& a) {
    const unsigned a_size = a.count();
    std::vector<std::uint64_t> votes(p.alphabet_size, 0);
    if (opt.exact) {
      const std::vector<unsigned> rest = complement_members(a, p.n);
      for_each_k_subset_of(rest, p.k - a_size,
                           [&](const Mask128& c) { ++votes[e.eval(a | c, a)]; });
    } else {
      RandomStream local = base.derive(a_index);
      const std::vector<unsigned> rest = complement_members(a, p.n);
      for (std::uint64_t i = 0; i < opt.samples_per_a; ++i) {
        Mask128 s;
        if (opt.votes.kind == VoteDist::Kind::uniform)
          s = a | sample_subset_of(rest, p.k - a_size, local);
        else
          s = a | sample_mu_p_of(rest, opt.votes.p, local);
        ++votes[e.eval(s, a)];
      }
    }
    values[a] = argmax_vote(votes, opt.tie_seed, a);
    ++a_index;
  });
  return GlobalFunction(p.n, p.d, p.alphabet_size, p.include_empty, std::move(values));
}

namespace {

// Frame of A relative to T: all points of bind(T ∪ A) in canonical order.
// Tuples of f_S over this frame are what level-i votes compare.
struct Frame {
  std::vector<Mask128> points;
};

Frame make_frame(const Mask128& t_mask, const Mask128& a, unsigned d, bool include_empty) {
  Frame f;
  f.points = small_subsets(t_mask | a, d, include_empty);
  return f;
}

std::vector<std::uint16_t> frame_tuple(const LocalEnsemble& e, const Mask128& s,
                                       const Frame& frame) {
  std::vector<std::uint16_t> tuple;
  tuple.reserve(frame.points.size());
  for (const auto& u : frame.points) tuple.push_back(e.eval(s, u));
  return tuple;
}

}  // namespace

std::pair<std::optional<GlobalFunction>, DecoderDiagnostics> restricted_decode(
    const LocalEnsemble& e, const VertexSet& t_set, const RestrictedOptions& opt,
    RandomStream& rng) {
  const auto& p = e.params();
  const Mask128 t_mask = t_set.mask();
  if (t_set.size() + p.d > p.k)
    throw parameter_error("restricted_decode: need |T| + d <= k");
  if (!t_mask.subset_of(Mask128::full(p.n)))
    throw parameter_error("restricted_decode: T outside ground set");

  DecoderDiagnostics diag;
  diag.exact = opt.exact;

  // One shared pool of S ⊇ T for every level.
  std::vector<Mask128> pool;
  const std::vector<unsigned> rest = complement_members(t_mask, p.n);
  RandomStream pool_rng = rng.derive("restricted_pool");
  if (opt.exact) {
    if (binomial(p.n - t_set.size(), p.k - t_set.size()) > opt.max_exact_pool)
      throw exact_infeasible_error("restricted_decode: X_T too large for exact mode");
    for_each_k_subset_of(rest, p.k - t_set.size(),
                         [&](const Mask128& c) { pool.push_back(t_mask | c); });
  } else {
    pool.reserve(opt.pool_size);
    for (std::uint64_t i = 0; i < opt.pool_size; ++i)
      pool.push_back(t_mask | sample_subset_of(rest, p.k - t_set.size(), pool_rng));
  }
  diag.pool_size = pool.size();
  if (pool.empty()) throw structural_error("restricted_decode: empty pool");

  std::vector<char> alive(pool.size(), 1);
  diag.delta.push_back(0.0);  // delta_{-1}
  std::unordered_map<Mask128, std::uint16_t, Mask128Hash> g;
  RandomStream fallback_rng = rng.derive("restricted_fallback");
  bool aborted = false;

  for (unsigned level = 0; level <= p.d; ++level) {
    if (diag.delta.back() > opt.abort_threshold) {
      aborted = true;
      break;
    }

    // Candidate extension sets at this level, canonical order.
    std::vector<Mask128> a_list;
    if (level == 0) {
      a_list.push_back(Mask128::empty_set());
    } else {
      for_each_k_subset_of(rest, level, [&](const Mask128& a) { a_list.push_back(a); });
    }
    std::unordered_map<Mask128, std::size_t, Mask128Hash> a_index;
    for (std::size_t i = 0; i < a_list.size(); ++i) a_index.emplace(a_list[i], i);

    // Invert pool → per-A support; X_{(A)} counts run over the whole pool.
    std::vector<std::vector<std::uint32_t>> support(a_list.size());
    std::vector<std::uint64_t> x_a_count(a_list.size(), 0);
    for (std::uint32_t si = 0; si < pool.size(); ++si) {
      const Mask128 outside = pool[si] - t_mask;
      std::vector<unsigned> mem;
      outside.for_each([&](unsigned v) { mem.push_back(v); });
      if (level > mem.size()) continue;
      for_each_k_subset_of(mem, level, [&](const Mask128& a) {
        const std::size_t ai = a_index.at(a);
        ++x_a_count[ai];
        if (alive[si]) support[ai].push_back(si);
      });
    }

    for (std::size_t ai = 0; ai < a_list.size(); ++ai) {
      const Mask128& a = a_list[ai];
      const Frame frame = make_frame(t_mask, a, p.d, p.include_empty);
      std::vector<std::uint16_t> g_tuple;
      if (support[ai].empty()) {
        // No conditioned voters: gamma(A) undefined; fall back to a fresh
        // global plurality over S ⊇ T ∪ A and flag it.
        diag.fallback.push_back(VertexSet(a));
        std::map<std::vector<std::uint16_t>, std::uint64_t> counts;
        const std::vector<unsigned> outside = complement_members(t_mask | a, p.n);
        for (std::uint64_t i = 0; i < opt.fallback_samples; ++i) {
          const Mask128 s =
              t_mask | a | sample_subset_of(outside, p.k - t_set.size() - level, fallback_rng);
          ++counts[frame_tuple(e, s, frame)];
        }
        std::uint64_t best = 0;
        for (const auto& [tuple, c] : counts) best = std::max(best, c);
        for (const auto& [tuple, c] : counts)
          if (c == best) {
            g_tuple = tuple;
            break;
          }
      } else {
        std::map<std::vector<std::uint16_t>, std::uint64_t> counts;
        for (std::uint32_t si : support[ai]) ++counts[frame_tuple(e, pool[si], frame)];
        std::uint64_t best = 0;
        for (const auto& [tuple, c] : counts) best = std::max(best, c);
        for (const auto& [tuple, c] : counts)
          if (c == best) {
            g_tuple = tuple;
            break;
          }
        const double gamma =
            1.0 - static_cast<double>(best) / static_cast<double>(support[ai].size());
        diag.gamma.emplace_back(VertexSet(a), gamma);
      }
      if (x_a_count[ai] > 0)
        diag.rho.emplace_back(VertexSet(a), static_cast<double>(support[ai].size()) /
                                                static_cast<double>(x_a_count[ai]));
      // Extend g on the new frame points: U with U \ T = A exactly.
      for (std::size_t pi = 0; pi < frame.points.size(); ++pi) {
        const Mask128& u = frame.points[pi];
        if ((u - t_mask) == a) g[u] = g_tuple[pi];
      }
    }

    // X^{(level)}: survivors must match g on every shared point with exactly
    // `level` elements outside T.
    std::uint64_t alive_count = 0;
    for (std::uint32_t si = 0; si < pool.size(); ++si) {
      if (!alive[si]) continue;
      bool ok = true;
      for_each_small_subset(pool[si], p.d, p.include_empty, [&](const Mask128& u) {
        if (ok && (u - t_mask).count() == level && e.eval(pool[si], u) != g.at(u)) ok = false;
      });
      alive[si] = ok ? 1 : 0;
      alive_count += ok ? 1 : 0;
    }
    diag.delta.push_back(1.0 - static_cast<double>(alive_count) /
                                   static_cast<double>(pool.size()));
  }

  if (aborted) {
    diag.aborted = true;
    while (diag.delta.size() < p.d + 2) diag.delta.push_back(1.0);
    return {std::nullopt, std::move(diag)};
  }
  GlobalFunction out(p.n, p.d, p.alphabet_size, p.include_empty, std::move(g));
  return {std::make_optional(std::move(out)), std::move(diag)};
}

McEstimate disagreement_rate(const LocalEnsemble& e, const GlobalFunction& g, bool exact,
                             std::uint64_t samples, RandomStream& rng, const VoteDist& regime,
                             double max_exact_cost) {
  check_global_matches(e, g);
  const auto& p = e.params();
  auto differs = [&](const Mask128& s) {
    bool diff = false;
    for_each_small_subset(s, p.d, p.include_empty, [&](const Mask128& a) {
      if (!diff && e.eval(s, a) != g.eval(a)) diff = true;
    });
    return diff;
  };

  McEstimate out;
  if (exact) {
    if (regime.kind == VoteDist::Kind::biased)
      throw parameter_error("disagreement_rate: exact mode enumerates uniform k-subsets only");
    const double total = binomial(p.n, p.k);
    if (total > max_exact_cost)
      throw exact_infeasible_error("disagreement_rate: C(n,k) over budget; use mc mode");
    std::uint64_t bad = 0;
    for_each_k_subset(p.n, p.k, [&](const Mask128& s) { bad += differs(s) ? 1 : 0; });
    out.exact = true;
    out.samples = static_cast<std::uint64_t>(total);
    out.estimate = static_cast<double>(bad) / total;
    return out;
  }
  if (samples == 0) throw parameter_error("disagreement_rate: need samples >= 1");
  std::uint64_t bad = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Mask128 s;
    if (regime.kind == VoteDist::Kind::uniform)
      s = sample_k_subset_mask(p.n, p.k, rng);
    else
      s = sample_mu_p(p.n, regime.p, rng);
    bad += differs(s) ? 1 : 0;
  }
  out.samples = samples;
  out.estimate = static_cast<double>(bad) / static_cast<double>(samples);
  out.ci_halfwidth = wilson_halfwidth(bad, samples);
  return out;
}

McEstimate restricted_pair_divergence(const LocalEnsemble& e, const VertexSet& t1,
                                      const VertexSet& t2, const RestrictedOptions& opt,
                                      std::uint64_t samples, RandomStream& rng) {
  const auto& p = e.params();
  const Mask128 joint = t1.mask() | t2.mask();
  if (joint.count() > p.k)
    throw parameter_error("restricted_pair_divergence: |T1 ∪ T2| > k");
  RandomStream d1 = rng.derive("divergence_t1");
  RandomStream d2 = rng.derive("divergence_t2");
  const auto [g1, diag1] = restricted_decode(e, t1, opt, d1);
  const auto [g2, diag2] = restricted_decode(e, t2, opt, d2);
  McEstimate out;
  out.samples = samples;
  if (!g1 || !g2) {
    out.estimate = 1.0;
    return out;
  }
  const std::vector<unsigned> rest = complement_members(joint, p.n);
  std::uint64_t diverged = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Mask128 s = joint | sample_subset_of(rest, p.k - joint.count(), rng);
    bool diff = false;
    for_each_small_subset(s, p.d, p.include_empty, [&](const Mask128& a) {
      if (!diff && g1->eval(a) != g2->eval(a)) diff = true;
    });
    diverged += diff ? 1 : 0;
  }
  out.estimate = static_cast<double>(diverged) / static_cast<double>(samples);
  out.ci_halfwidth = wilson_halfwidth(diverged, samples);
  return out;
}

}  // namespace agl
