#include "agreelab/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "agreelab/combinatorics.hpp"
#include "agreelab/errors.hpp"

namespace agl {

namespace {

constexpr double kCountEps = 1e-9;

// Distinct (d-r)-subsets of the edges of h; for target_size 0 that is {∅}.
std::vector<Mask128> candidate_subsets(const Hypergraph& h, unsigned target_size) {
  if (target_size == 0) return {Mask128::empty_set()};
  std::unordered_set<Mask128, Mask128Hash> seen;
  std::vector<Mask128> out;
  for (const auto& e : h.edges()) {
    std::vector<unsigned> mem;
    mem.reserve(e.size());
    for (unsigned v : e.members()) mem.push_back(v);
    for_each_k_subset_of(mem, target_size, [&](const Mask128& a) {
      if (seen.insert(a).second) out.push_back(a);
    });
  }
  std::sort(out.begin(), out.end(), [](const Mask128& x, const Mask128& y) { return lex_less(x, y); });
  return out;
}

Hypergraph make_hypergraph(unsigned n, const std::vector<Mask128>& edges) {
  std::vector<VertexSet> vs;
  vs.reserve(edges.size());
  for (const auto& m : edges) vs.emplace_back(m);
  return Hypergraph(n, std::move(vs), true);
}

}  // namespace

HitOracle make_hit_oracle(const PruneConfig& cfg, unsigned n, RandomStream& rng) {
  const SubsetDist dist = SubsetDist::biased(n, cfg.p);
  // Each oracle call gets its own derived stream so evaluation order cannot
  // perturb downstream draws.
  auto counter = std::make_shared<std::uint64_t>(0);
  auto base = std::make_shared<RandomStream>(rng.derive("hit_oracle"));
  const HitExactGuards guards = cfg.hit_guards;
  const std::uint64_t samples = cfg.mc_samples;
  return [dist, counter, base, guards, samples](const Hypergraph& h) {
    RandomStream local = base->derive((*counter)++);
    return hit_eval(h, dist, samples, local, guards);
  };
}

CriticalDepthResult critical_depth(const Hypergraph& h, const PruneConfig& cfg,
                                   const HitOracle& hit) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw parameter_error("critical_depth: need p in (0,1)");
  if (!(cfg.c > 0.0)) throw parameter_error("critical_depth: need c > 0");
  CriticalDepthResult res;
  if (h.empty()) {
    res.pruned = true;
    res.h_d = h;
    res.h_seq.push_back(h);
    return res;
  }
  const unsigned d = h.uniformity();
  if (!h.is_uniform(d)) throw parameter_error("critical_depth: hypergraph not uniform");

  const double ratio = cfg.c / cfg.p;
  res.h_seq.push_back(h);
  for (unsigned r = 1; r <= d; ++r) {
    const Hypergraph& prev = res.h_seq.back();
    const double threshold = std::pow(ratio, r) - kCountEps;
    std::vector<Mask128> b_edges;
    for (const Mask128& a : candidate_subsets(prev, d - r))
      if (static_cast<double>(prev.extensions_of(a)) >= threshold) b_edges.push_back(a);
    const Hypergraph b = make_hypergraph(h.ground_size(), b_edges);

    std::vector<VertexSet> kept, removed;
    for (const auto& e : prev.edges()) {
      const bool extends_b = kernels::backend().any_contained(
          b.packed_lo(), b.packed_hi(), b.edge_count(), e.mask());
      (extends_b ? removed : kept).push_back(e);
    }
    res.b_seq.push_back(b);
    res.removed_seq.emplace_back(h.ground_size(), std::move(removed), true);
    res.h_seq.emplace_back(h.ground_size(), std::move(kept), true);
  }

  // Candidates: H_d, then B_1..B_d; one of them carries hit(H)/(d+1).
  res.hit_input = hit(h);
  const double floor_est = res.hit_input.estimate / static_cast<double>(d + 1);
  const double floor_slack = res.hit_input.ci_halfwidth / static_cast<double>(d + 1);
  auto audit_candidate = [&](unsigned r, const Hypergraph& g) {
    CandidateAudit a;
    a.r = r;
    a.edge_count = g.edge_count();
    a.hit = g.empty() ? McEstimate{0.0, 0.0, 0, true} : hit(g);
    a.eligible = a.hit.estimate + a.hit.ci_halfwidth >= floor_est - floor_slack;
    res.candidates.push_back(a);
  };
  audit_candidate(0, res.h_seq[d]);
  for (unsigned r = 1; r <= d; ++r) audit_candidate(r, res.b_seq[r - 1]);

  // Deterministic pick: max estimated hit among eligible candidates, ties
  // toward smaller r (H_d counts as r = 0); if estimation noise starves the
  // eligible set, fall back to the global max.
  int best = -1;
  for (std::size_t i = 0; i < res.candidates.size(); ++i) {
    const auto& cand = res.candidates[i];
    if (!cand.eligible) continue;
    if (cfg.selection == PruneConfig::Selection::first_qualifying) {
      best = static_cast<int>(i);
      break;
    }
    if (best < 0 || cand.hit.estimate > res.candidates[static_cast<std::size_t>(best)].hit.estimate)
      best = static_cast<int>(i);
  }
  if (best < 0) {
    for (std::size_t i = 0; i < res.candidates.size(); ++i)
      if (best < 0 ||
          res.candidates[i].hit.estimate > res.candidates[static_cast<std::size_t>(best)].hit.estimate)
        best = static_cast<int>(i);
  }

  const unsigned chosen = res.candidates[static_cast<std::size_t>(best)].r;
  if (chosen == 0) {
    res.pruned = true;
    res.h_d = res.h_seq[d];
  } else {
    res.pruned = false;
    res.r = chosen;
    res.critical_i = res.b_seq[chosen - 1];
    res.h_prev = res.h_seq[chosen - 1];
  }
  return res;
}

Hypergraph complete_multi(const Hypergraph& h_prev, const Hypergraph& i_pruned,
                          const PruneConfig& cfg) {
  (void)cfg;
  std::vector<VertexSet> kept;
  for (const auto& e : h_prev.edges()) {
    const std::size_t c = kernels::backend().count_contained_capped(
        i_pruned.packed_lo(), i_pruned.packed_hi(), i_pruned.edge_count(), e.mask(), 2);
    if (c >= 2) kept.push_back(e);
  }
  return Hypergraph(h_prev.ground_size(), std::move(kept), true);
}

Hypergraph complete_fill(const Hypergraph& h_prev, const Hypergraph& i_pruned,
                         const Hypergraph& k_multi, const PruneConfig& cfg) {
  if (i_pruned.empty()) return k_multi;
  const unsigned d = h_prev.uniformity();
  const unsigned di = i_pruned.uniformity();
  if (di >= d && !h_prev.empty())
    throw parameter_error("complete_fill: I must have strictly smaller uniformity than H");
  const unsigned r = d - di;
  const double target = std::floor(std::pow(cfg.c / cfg.p, r) + kCountEps);

  std::unordered_set<Mask128, Mask128Hash> in_multi;
  for (const auto& e : k_multi.edges()) in_multi.insert(e.mask());

  std::vector<VertexSet> out = k_multi.edges();
  for (const auto& ie : i_pruned.edges()) {
    const auto n_e = static_cast<double>(k_multi.extensions_of(ie.mask()));
    const auto m_e = static_cast<std::size_t>(std::max(0.0, target - n_e));
    std::size_t added = 0;
    // h_prev edges are lex-sorted, so this takes the lexicographically least
    // extensions outside K_multi. An edge outside K_multi extends at most
    // one I-edge, so fills never collide across I-edges.
    for (const auto& he : h_prev.edges()) {
      if (added == m_e) break;
      if (!ie.mask().subset_of(he.mask()) || in_multi.contains(he.mask())) continue;
      out.push_back(he);
      ++added;
    }
    if (added < m_e)
      throw structural_error("complete_fill: edge {" + ie.to_key() + "} has only " +
                             std::to_string(n_e + static_cast<double>(added)) +
                             " extensions available; needs " + std::to_string(target));
  }
  return Hypergraph(h_prev.ground_size(), std::move(out), true);
}

void validate_completion_preconditions(const Hypergraph& h_prev, const Hypergraph& i_pruned,
                                       const PruneConfig& cfg) {
  const unsigned d = h_prev.uniformity();
  const unsigned di = i_pruned.uniformity();
  const unsigned r = d - di;
  const double ratio = cfg.c / cfg.p;
  // Floors: every I-edge has at least (c/p)^r extensions in H.
  for (const auto& ie : i_pruned.edges()) {
    if (static_cast<double>(h_prev.extensions_of(ie.mask())) < std::pow(ratio, r) - kCountEps)
      throw structural_error("completion precondition: edge {" + ie.to_key() +
                             "} lacks (c/p)^r extensions");
  }
  // Caps: for e in I and nonempty A disjoint from e contained in some edge,
  // e ∪ A has at most (c/p)^{r-|A|} extensions.
  for (const auto& ie : i_pruned.edges()) {
    for (const auto& he : h_prev.edges()) {
      if (!ie.mask().subset_of(he.mask())) continue;
      const Mask128 extra = he.mask() - ie.mask();
      std::vector<unsigned> mem;
      extra.for_each([&](unsigned v) { mem.push_back(v); });
      for (unsigned sz = 1; sz <= std::min<unsigned>(r, static_cast<unsigned>(mem.size())); ++sz) {
        for_each_k_subset_of(mem, sz, [&](const Mask128& a) {
          const double cap = std::pow(ratio, static_cast<int>(r) - static_cast<int>(sz)) + kCountEps;
          if (static_cast<double>(h_prev.extensions_of(ie.mask() | a)) > cap)
            throw structural_error("completion precondition: extension cap violated at {" +
                                   VertexSet(ie.mask() | a).to_key() + "}");
        });
      }
    }
  }
  if (!i_pruned.empty() && di > 0) {
    if (!check_branching(i_pruned, std::max(1.0, ratio)).ok)
      throw structural_error("completion precondition: I exceeds branching factor c/p");
  }
}

Hypergraph prune_biased(const Hypergraph& h, const PruneConfig& cfg, RandomStream& rng,
                        PruneAudit* audit) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw parameter_error("prune_biased: need p in (0,1)");
  if (!(cfg.c > 0.0)) throw parameter_error("prune_biased: need c > 0");
  const unsigned d = h.uniformity();
  if (audit) {
    audit->budget_c = cfg.c;
    audit->budget_rho = cfg.rho();
  }
  if (h.empty() || d == 0) {
    if (audit) audit->shrink_m = 1.0;
    return h;
  }
  if (!h.is_uniform(d)) throw parameter_error("prune_biased: hypergraph not d-uniform");
  if (cfg.rho() < 1.0) {
    // No nonempty hypergraph has branching factor below 1; the recursion
    // reaches this when the adaptive shrink pushes γ/p under 1.
    if (audit) audit->shrink_m = 1.0;
    return Hypergraph(h.ground_size(), {}, true);
  }

  // γ = c/M with adaptive M: by the completion bounds M ~ 3·2^d always
  // suffices for the branching postcondition, but starting small keeps more
  // hit mass; double until the completed hypergraph actually passes.
  for (double m = 2.0; m <= 1048576.0; m *= 2.0) {
    PruneConfig sub = cfg;
    sub.c = cfg.c / m;
    RandomStream stage_rng = rng.derive("prune_m").derive(static_cast<std::uint64_t>(m));
    const HitOracle oracle = make_hit_oracle(sub, h.ground_size(), stage_rng);
    CriticalDepthResult step = critical_depth(h, sub, oracle);

    Hypergraph k;
    PruneAudit nested_audit;
    if (step.pruned) {
      k = step.h_d;
    } else {
      RandomStream rec_rng = stage_rng.derive("recurse");
      const Hypergraph i_pruned =
          prune_biased(step.critical_i, sub, rec_rng, audit ? &nested_audit : nullptr);
      const Hypergraph k_multi = complete_multi(step.h_prev, i_pruned, sub);
      k = complete_fill(step.h_prev, i_pruned, k_multi, sub);
    }

    if (check_branching(k, cfg.rho()).ok) {
      for (const auto& e : k.edges())
        if (!h.contains_edge(e.mask()))
          throw structural_error("prune_biased: output not a subhypergraph");
      if (audit) {
        audit->shrink_m = m;
        audit->critical_r = step.pruned ? 0 : step.r;
        audit->hit_input = step.hit_input;
        audit->candidates = step.candidates;
        if (!step.pruned) audit->nested = std::make_unique<PruneAudit>(std::move(nested_audit));
      }
      return k;
    }
  }
  throw structural_error("prune_biased: no shrink factor produced a valid completion");
}

namespace {

// Default branching budget for the uniform transfer. The fill schedule at
// shrink M = 2 keeps floor(γ_j/p) >= 1 down the recursion only when
// c >= p·2^d; widening by `width` multiplies every fill count, and the
// first-order unique-hit failure estimate scales like d·width·p, so width
// grows only while that stays under epsilon.
double default_budget(unsigned d, double p, double epsilon) {
  const double base = std::ldexp(p, static_cast<int>(d));  // p * 2^d
  double width = std::floor(epsilon / (static_cast<double>(d) * p));
  width = std::clamp(width, 1.0, 16.0);
  return base * width;
}

}  // namespace

Hypergraph prune_uniform(const Hypergraph& h, unsigned n, unsigned k, double epsilon,
                         RandomStream& rng, std::optional<double> cfg_c, PruneAudit* audit,
                         std::vector<std::string>* warnings) {
  if (n != h.ground_size()) throw parameter_error("prune_uniform: n differs from hypergraph");
  const unsigned d = h.uniformity();
  if (h.empty()) return h;
  if (k < 2 * d) throw parameter_error("prune_uniform: need k >= 2d");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw parameter_error("prune_uniform: epsilon in (0,1)");
  PruneConfig cfg;
  cfg.p = static_cast<double>(k) / static_cast<double>(n);
  cfg.epsilon = std::min(epsilon / 2.0, 0.5);
  cfg.c = cfg_c.value_or(default_budget(d, cfg.p, cfg.epsilon));
  if (warnings && cfg.p > cfg.p0_guard)
    warnings->push_back("k/n = " + std::to_string(cfg.p) + " above the p0 guard " +
                        std::to_string(cfg.p0_guard) + "; unique-hit slack not expected to hold");
  return prune_biased(h, cfg, rng, audit);
}

McEstimate verify_unique_hit(const Hypergraph& h_prime, const VertexSet& e,
                             const SubsetDist& dist, bool exact, std::uint64_t samples,
                             RandomStream& rng, const HitExactGuards& guards) {
  if (!h_prime.contains_edge(e.mask())) throw parameter_error("verify_unique_hit: e not in H'");
  if (dist.n != h_prime.ground_size())
    throw parameter_error("verify_unique_hit: distribution ground set mismatch");
  if (dist.kind == SubsetDist::Kind::uniform && dist.k < e.size())
    throw parameter_error("verify_unique_hit: k < |e| makes the conditioning empty");

  // Another edge inside e is contained in every S ⊇ e.
  for (const auto& f : h_prime.edges())
    if (!(f.mask() == e.mask()) && f.mask().subset_of(e.mask()))
      return McEstimate{0.0, 0.0, 0, true};

  std::vector<VertexSet> others;
  for (const auto& f : h_prime.edges())
    if (!(f.mask() == e.mask())) others.push_back(f);
  const Hypergraph rest(h_prime.ground_size(), std::move(others), true);
  const Hypergraph link = relabel_without(link_delete(rest, e), e);

  SubsetDist cond;
  if (dist.kind == SubsetDist::Kind::uniform)
    cond = SubsetDist::uniform(dist.n - e.size(), dist.k - e.size());
  else
    cond = SubsetDist::biased(dist.n - e.size(), dist.p);

  if (exact) {
    McEstimate out;
    out.exact = true;
    out.estimate = 1.0 - hit_exact(link, cond, guards);
    return out;
  }
  McEstimate hit = hit_mc(link, cond, samples, rng);
  hit.estimate = 1.0 - hit.estimate;
  return hit;
}

}  // namespace agl
