#include "agreelab/agreement.hpp"

#include <functional>

#include "agreelab/errors.hpp"
#include "agreelab/samplers.hpp"

namespace agl {

namespace {

// Walk the shared domain bind(S1 ∩ S2) and stop early when told to.
// visit(a) returns false to stop; returns true if the walk completed.
template <class Visit>
bool walk_shared_domain(const LocalEnsemble& e, const Mask128& s1, const Mask128& s2,
                        Visit&& visit) {
  const Mask128 shared = s1 & s2;
  // for_each_small_subset has no early exit; the manual loop pays off here,
  // the hottest path in the library.
  std::vector<unsigned> members;
  members.reserve(shared.count());
  shared.for_each([&](unsigned v) { members.push_back(v); });
  const unsigned d = e.params().d;
  if (e.params().include_empty && !visit(Mask128::empty_set())) return false;
  const unsigned limit = std::min<unsigned>(d, static_cast<unsigned>(members.size()));
  for (unsigned size = 1; size <= limit; ++size) {
    for (KSubsetEnumerator en(static_cast<unsigned>(members.size()), size); !en.done();
         en.advance()) {
      Mask128 a;
      for (unsigned i : en.indices()) a.set(members[i]);
      if (!visit(a)) return false;
    }
  }
  return true;
}

// Uniform-weight enumeration of nu_{n,k,t} pairs with S1 ∩ S2 ⊇ anchor.
// Enumerates (W, C1, C2): U = anchor ∪ W, S1 = U ∪ C1, S2 = U ∪ C2 with C1,
// C2 disjoint completions. Every conditioned pair appears exactly once.
template <class F>
void for_each_nu_pair_containing(unsigned n, unsigned k, unsigned t, const Mask128& anchor,
                                 F&& f) {
  const unsigned a = anchor.count();
  const std::vector<unsigned> rest = complement_members(anchor, n);
  for_each_k_subset_of(rest, t - a, [&](const Mask128& w) {
    const Mask128 u = anchor | w;
    const std::vector<unsigned> outside = complement_members(u, n);
    for_each_k_subset_of(outside, k - t, [&](const Mask128& c1) {
      const Mask128 s1 = u | c1;
      std::vector<unsigned> outside2;
      outside2.reserve(outside.size() - (k - t));
      for (unsigned v : outside)
        if (!c1.test(v)) outside2.push_back(v);
      for_each_k_subset_of(outside2, k - t,
                           [&](const Mask128& c2) { f(s1, u | c2); });
    });
  });
}

double nu_pair_count_containing(unsigned n, unsigned k, unsigned t, unsigned anchor_size) {
  return binomial(n - anchor_size, t - anchor_size) * binomial(n - t, k - t) *
         binomial(n - k, k - t);
}

void check_nu_params(const LocalEnsemble& e, unsigned t) {
  const auto& p = e.params();
  TestParams tp = p.test_params(t);
  tp.validate();
  if (p.n < 2 * p.k - t) throw parameter_error("nu distribution: need n >= 2k - t");
}

}  // namespace

bool agree_check(const LocalFunction& f1, const LocalFunction& f2, unsigned d) {
  const Mask128 shared = f1.s.mask() & f2.s.mask();
  const bool include_empty = f1.include_empty && f2.include_empty;
  bool ok = true;
  for_each_small_subset(shared, d, include_empty, [&](const Mask128& a) {
    if (ok && f1.eval(a) != f2.eval(a)) ok = false;
  });
  return ok;
}

bool pair_agrees(const LocalEnsemble& e, const Mask128& s1, const Mask128& s2) {
  return walk_shared_domain(e, s1, s2,
                            [&](const Mask128& a) { return e.eval(s1, a) == e.eval(s2, a); });
}

unsigned pair_disagreements(const LocalEnsemble& e, const Mask128& s1, const Mask128& s2) {
  unsigned count = 0;
  walk_shared_domain(e, s1, s2, [&](const Mask128& a) {
    if (e.eval(s1, a) != e.eval(s2, a)) ++count;
    return true;
  });
  return count;
}

AgreementReport agreement_estimate(const LocalEnsemble& e, const PairDist& dist,
                                   std::uint64_t samples, RandomStream& rng, bool breakdown) {
  if (samples == 0) throw parameter_error("agreement_estimate: need samples >= 1");
  const auto& params = e.params();
  std::function<std::pair<Mask128, Mask128>()> draw;
  if (const auto* nu = std::get_if<NuDist>(&dist)) {
    check_nu_params(e, nu->t);
    const TestParams tp = params.test_params(nu->t);
    draw = [tp, &rng]() { return sample_pair_nu_mask(tp, rng); };
  } else {
    const auto& mu = std::get<MuPQDist>(dist);
    const BiasedPairParams bp{mu.p, mu.q};
    bp.validate();
    draw = [bp, n = params.n, &rng]() { return sample_pair_mu_mask(n, bp, rng); };
  }

  AgreementReport report;
  report.samples = samples;
  std::uint64_t failures = 0;
  std::map<unsigned, std::uint64_t> hist;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [s1, s2] = draw();
    if (breakdown) {
      const unsigned j = pair_disagreements(e, s1, s2);
      if (j > 0) {
        ++failures;
        ++hist[j];
      }
    } else if (!pair_agrees(e, s1, s2)) {
      ++failures;
    }
  }
  report.epsilon_hat = static_cast<double>(failures) / static_cast<double>(samples);
  report.ci_halfwidth = wilson_halfwidth(failures, samples);
  for (const auto& [j, c] : hist)
    report.per_size_breakdown[j] = static_cast<double>(c) / static_cast<double>(samples);
  return report;
}

AgreementReport agreement_exact(const LocalEnsemble& e, unsigned t, double max_triples) {
  check_nu_params(e, t);
  const auto& p = e.params();
  const double total = nu_pair_count_containing(p.n, p.k, t, 0);
  if (total > max_triples)
    throw exact_infeasible_error("agreement_exact: support too large; use agreement_estimate");

  AgreementReport report;
  report.exact = true;
  report.samples = static_cast<std::uint64_t>(total);
  std::uint64_t failures = 0;
  std::map<unsigned, std::uint64_t> hist;
  for_each_nu_pair_containing(p.n, p.k, t, Mask128::empty_set(),
                              [&](const Mask128& s1, const Mask128& s2) {
                                const unsigned j = pair_disagreements(e, s1, s2);
                                if (j > 0) {
                                  ++failures;
                                  ++hist[j];
                                }
                              });
  report.epsilon_hat = static_cast<double>(failures) / total;
  for (const auto& [j, c] : hist) report.per_size_breakdown[j] = static_cast<double>(c) / total;
  return report;
}

namespace {

// Shared event logic for the conditional quantities. With a_set absent the
// event is a disagreement on the T-frame; otherwise: agreement on every
// shared point with at most |A|-1 elements outside T, plus a disagreement on
// a point whose outside part sits inside A.
bool conditional_event(const LocalEnsemble& e, const Mask128& t_mask,
                       const std::optional<Mask128>& a_mask, const Mask128& s1,
                       const Mask128& s2) {
  if (!a_mask) {
    bool disagree = false;
    walk_shared_domain(e, s1, s2, [&](const Mask128& a) {
      if ((a - t_mask).empty() && e.eval(s1, a) != e.eval(s2, a)) {
        disagree = true;
        return false;
      }
      return true;
    });
    return disagree;
  }
  const unsigned i = a_mask->count();
  bool frame_ok = true;
  bool a_frame_diff = false;
  walk_shared_domain(e, s1, s2, [&](const Mask128& a) {
    const Mask128 outside = a - t_mask;
    const bool differ = e.eval(s1, a) != e.eval(s2, a);
    if (outside.count() <= i - 1 && differ) {
      frame_ok = false;
      return false;
    }
    if (outside.subset_of(*a_mask) && differ) a_frame_diff = true;
    return true;
  });
  return frame_ok && a_frame_diff;
}

void validate_conditional(const LocalEnsemble& e, const VertexSet& t_set,
                          const std::optional<VertexSet>& a_set, unsigned t) {
  check_nu_params(e, t);
  if (!t_set.mask().subset_of(Mask128::full(e.params().n)) ||
      (a_set && !a_set->mask().subset_of(Mask128::full(e.params().n))))
    throw parameter_error("conditional_disagreement: T/A outside the ground set");
  unsigned anchor = t_set.size();
  if (a_set) {
    if (a_set->empty() || a_set->size() > e.params().d)
      throw parameter_error("conditional_disagreement: need 1 <= |A| <= d");
    if (a_set->mask().intersects(t_set.mask()))
      throw parameter_error("conditional_disagreement: A must be disjoint from T");
    anchor += a_set->size();
  }
  if (anchor > t) throw parameter_error("conditional_disagreement: |T ∪ A| > t");
}

}  // namespace

McEstimate conditional_disagreement(const LocalEnsemble& e, const VertexSet& t_set,
                                    const std::optional<VertexSet>& a_set, unsigned t,
                                    std::uint64_t samples, RandomStream& rng) {
  validate_conditional(e, t_set, a_set, t);
  const auto& p = e.params();
  const TestParams tp = p.test_params(t);
  Mask128 anchor = t_set.mask();
  std::optional<Mask128> a_mask;
  if (a_set) {
    a_mask = a_set->mask();
    anchor = anchor | *a_mask;
  }
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [s1, s2] = sample_pair_nu_containing(tp, anchor, rng);
    hits += conditional_event(e, t_set.mask(), a_mask, s1, s2) ? 1 : 0;
  }
  McEstimate out;
  out.samples = samples;
  out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  out.ci_halfwidth = wilson_halfwidth(hits, samples);
  return out;
}

McEstimate conditional_disagreement_exact(const LocalEnsemble& e, const VertexSet& t_set,
                                          const std::optional<VertexSet>& a_set, unsigned t,
                                          double max_triples) {
  validate_conditional(e, t_set, a_set, t);
  const auto& p = e.params();
  Mask128 anchor = t_set.mask();
  std::optional<Mask128> a_mask;
  if (a_set) {
    a_mask = a_set->mask();
    anchor = anchor | *a_mask;
  }
  const double total = nu_pair_count_containing(p.n, p.k, t, anchor.count());
  if (total > max_triples)
    throw exact_infeasible_error("conditional_disagreement_exact: support too large");
  std::uint64_t hits = 0;
  for_each_nu_pair_containing(p.n, p.k, t, anchor, [&](const Mask128& s1, const Mask128& s2) {
    hits += conditional_event(e, t_set.mask(), a_mask, s1, s2) ? 1 : 0;
  });
  McEstimate out;
  out.exact = true;
  out.samples = static_cast<std::uint64_t>(total);
  out.estimate = static_cast<double>(hits) / total;
  return out;
}

}  // namespace agl
