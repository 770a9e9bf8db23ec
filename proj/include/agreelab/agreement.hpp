#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>

#include "agreelab/ensemble.hpp"
#include "agreelab/stats.hpp"

namespace agl {

/// Pair distribution for agreement estimation.
struct NuDist {
  unsigned t = 0;
};
struct MuPQDist {
  double p = 0.0;
  double q = 1.0;
};
using PairDist = std::variant<NuDist, MuPQDist>;

struct AgreementReport {
  double epsilon_hat = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t samples = 0;
  bool exact = false;
  /// eps_j: probability of disagreeing on exactly j points of the shared
  /// domain (present when requested / in exact mode).
  std::map<unsigned, double> per_size_breakdown;
};

/// f1 and f2 agree on every A in the intersection of their domains with
/// |A| in [1,d] (the empty set joins when both tables carry it).
bool agree_check(const LocalFunction& f1, const LocalFunction& f2, unsigned d);

/// Same check evaluated straight off the ensemble, no tables materialized.
bool pair_agrees(const LocalEnsemble& e, const Mask128& s1, const Mask128& s2);

/// Number of disagreeing points in the shared domain.
unsigned pair_disagreements(const LocalEnsemble& e, const Mask128& s1, const Mask128& s2);

/// Monte Carlo estimate of eps = Pr[f_{S1} !~ f_{S2}] under nu_{n,k,t} or
/// mu_{p,q}, with Wilson 95% CI and optional eps_j breakdown.
AgreementReport agreement_estimate(const LocalEnsemble& e, const PairDist& dist,
                                   std::uint64_t samples, RandomStream& rng,
                                   bool breakdown = false);

/// Exact eps by enumerating the nu_{n,k,t} support with uniform weights over
/// the (U, S1\U, S2\U) construction. Guarded; throws exact_infeasible_error
/// above the budget.
AgreementReport agreement_exact(const LocalEnsemble& e, unsigned t, double max_triples = 2e7);

/// Conditional disagreement quantities. With A absent this is eps_T(empty):
/// the probability, over nu pairs with S1 ∩ S2 ⊇ T, that the two functions
/// differ somewhere on the T-frame (all points inside T). With A present
/// (|A| = i, disjoint from T) it is eps_{T,A}: pairs with S1 ∩ S2 ⊇ T ∪ A
/// that agree on every shared point with at most i-1 elements outside T yet
/// differ on a shared point whose outside part lies in A. |T| follows the
/// caller's convention (t-1 at d = 1, t-d in general).
McEstimate conditional_disagreement(const LocalEnsemble& e, const VertexSet& t_set,
                                    const std::optional<VertexSet>& a_set, unsigned t,
                                    std::uint64_t samples, RandomStream& rng);

/// Exact counterpart by enumeration of the conditioned support.
McEstimate conditional_disagreement_exact(const LocalEnsemble& e, const VertexSet& t_set,
                                          const std::optional<VertexSet>& a_set, unsigned t,
                                          double max_triples = 2e7);

}  // namespace agl
