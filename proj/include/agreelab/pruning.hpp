#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "agreelab/branching.hpp"
#include "agreelab/hit.hpp"
#include "agreelab/hypergraph.hpp"

namespace agl {

/// Branching budget and bias for one pruning run. c/p is the target
/// branching factor of the output (must be >= 1); epsilon is the unique-hit
/// slack the caller is aiming for and feeds the default choice of c in the
/// uniform transfer.
struct PruneConfig {
  double c = 0.0;
  double p = 0.0;
  double epsilon = 0.25;
  enum class Selection { max_hit, first_qualifying } selection = Selection::max_hit;
  std::uint64_t mc_samples = 10000;
  double p0_guard = 0.15;  // warn above this bias in the uniform transfer
  HitExactGuards hit_guards{2e5, 2e7, 16, 26, 1u << 20};

  double rho() const { return c / p; }
};

using HitOracle = std::function<McEstimate(const Hypergraph&)>;

/// Oracle evaluating hit under mu_p: exact when affordable per cfg guards,
/// Monte Carlo with cfg.mc_samples otherwise. Streams derive from rng.
HitOracle make_hit_oracle(const PruneConfig& cfg, unsigned n, RandomStream& rng);

struct CandidateAudit {
  unsigned r = 0;  // 0 means the fully pruned H_d; 1..d means B_r
  McEstimate hit;
  bool eligible = false;
  std::size_t edge_count = 0;
};

/// Result of the critical-depth decomposition. Either the fully pruned H_d
/// carries enough hit mass (pruned == true), or a critical depth r was
/// selected with I = B_r and the preceding H_{r-1}. h_seq/b_seq record the
/// whole H_0..H_d / B_1..B_d ladder and removed_seq the edges each step
/// removed, so the decomposition identity is checkable.
struct CriticalDepthResult {
  bool pruned = false;
  unsigned r = 0;
  Hypergraph h_d;
  Hypergraph critical_i;  // contains the empty edge when r == d
  Hypergraph h_prev;
  McEstimate hit_input;
  std::vector<CandidateAudit> candidates;
  std::vector<Hypergraph> h_seq;
  std::vector<Hypergraph> b_seq;
  std::vector<Hypergraph> removed_seq;
};

/// The B_r / H_r ladder: B_r collects all (d-r)-sets with at least (c/p)^r
/// extensions in H_{r-1}; H_r drops every extension of B_r. Selection runs
/// over the d+1 candidates whose estimated hit clears hit(H)/(d+1).
CriticalDepthResult critical_depth(const Hypergraph& h, const PruneConfig& cfg,
                                   const HitOracle& hit);

/// Hyperedges of h_prev extending at least two distinct edges of i_pruned.
Hypergraph complete_multi(const Hypergraph& h_prev, const Hypergraph& i_pruned,
                          const PruneConfig& cfg);

/// Tops K_multi up so every edge of i_pruned keeps floor((c/p)^r) extensions,
/// drawing the lexicographically least extensions from h_prev \ K_multi.
Hypergraph complete_fill(const Hypergraph& h_prev, const Hypergraph& i_pruned,
                         const Hypergraph& k_multi, const PruneConfig& cfg);

/// Debug/test validation of the completion hypotheses (extension floors and
/// caps relative to h_prev, branching of i_pruned).
void validate_completion_preconditions(const Hypergraph& h_prev, const Hypergraph& i_pruned,
                                       const PruneConfig& cfg);

struct PruneAudit {
  double shrink_m = 0.0;  // final internal shrink divisor M_d
  double budget_c = 0.0;  // effective c (derived in the uniform transfer)
  double budget_rho = 0.0;  // c/p the output is certified against
  unsigned critical_r = 0;  // 0 when the pruned branch was taken
  McEstimate hit_input;
  std::vector<CandidateAudit> candidates;
  std::unique_ptr<PruneAudit> nested;  // recursion on I
};

/// Biased-setting pruning: returns a subhypergraph passing check_branching
/// at c/p (hard postcondition, enforced by an adaptive internal shrink γ =
/// c/M that doubles M until the completed hypergraph passes). 0-uniform
/// input returns unchanged.
Hypergraph prune_biased(const Hypergraph& h, const PruneConfig& cfg, RandomStream& rng,
                        PruneAudit* audit = nullptr);

/// Uniform-setting transfer: p = k/n, epsilon' = min(epsilon/2, 1/2), then
/// prune_biased. When cfg_c is unset a default branching budget is derived
/// from (d, p, epsilon'): the smallest power-of-two fill schedule that keeps
/// the completion alive, widened while the first-order unique-hit estimate
/// stays under epsilon'.
Hypergraph prune_uniform(const Hypergraph& h, unsigned n, unsigned k, double epsilon,
                         RandomStream& rng, std::optional<double> cfg_c = std::nullopt,
                         PruneAudit* audit = nullptr,
                         std::vector<std::string>* warnings = nullptr);

/// Pr[H'|_S = {e} | S ⊇ e]: the unique-hit probability of edge e, computed
/// on the link K = (H' - e)|_{e=∅} over the conditional distribution.
McEstimate verify_unique_hit(const Hypergraph& h_prime, const VertexSet& e,
                             const SubsetDist& dist, bool exact, std::uint64_t samples,
                             RandomStream& rng, const HitExactGuards& guards = {});

}  // namespace agl
