#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "agreelab/ensemble.hpp"
#include "agreelab/stats.hpp"

namespace agl {

/// How voters S ⊇ A are drawn: uniform k-supersets or mu_p-conditional.
struct VoteDist {
  enum class Kind { uniform, biased } kind = Kind::uniform;
  double p = 0.0;
  static VoteDist uniform() { return {}; }
  static VoteDist biased(double p) { return {Kind::biased, p}; }
};

struct PluralityOptions {
  bool exact = false;               // enumerate all S ⊇ A instead of sampling
  std::uint64_t samples_per_a = 256;
  VoteDist votes = VoteDist::uniform();
  std::optional<std::uint64_t> tie_seed;  // explore alternative tie choices
  double max_exact_cost = 2e7;      // total enumeration budget in exact mode
};

/// G(A) = the most frequent value of f_S(A) over S ⊇ A; ties go to the
/// smallest symbol index unless a tie seed asks for a keyed choice.
GlobalFunction plurality_decode(const LocalEnsemble& e, const PluralityOptions& opt,
                                RandomStream& rng);

/// Per-level decoder audit: delta[i+1] holds delta_i (so delta[0] = 0 is
/// delta_{-1}), gamma/rho are keyed by the level-i extension sets A, in
/// canonical order. aborted mirrors g = ⊥.
struct DecoderDiagnostics {
  std::vector<double> delta;
  std::vector<std::pair<VertexSet, double>> gamma;
  std::vector<std::pair<VertexSet, double>> rho;
  std::vector<VertexSet> fallback;  // A with empty conditioned support
  bool aborted = false;
  bool exact = false;
  std::uint64_t pool_size = 0;
};

struct RestrictedOptions {
  bool exact = false;               // enumerate X_T when affordable
  std::uint64_t pool_size = 5000;   // sampled pool of S ⊇ T otherwise
  std::uint64_t fallback_samples = 64;
  double max_exact_pool = 2e5;      // C(n-|T|, k-|T|) budget for exact mode
  double abort_threshold = 0.5;     // diagnostics only; 1/2 in acceptance runs
};

/// The incremental restricted decoder g_T: level-by-level popular vote over
/// the surviving pool X^{(i)}, with the delta_{i-1} > 1/2 abort. Returns the
/// decoded global function (empty optional when aborted) plus diagnostics.
std::pair<std::optional<GlobalFunction>, DecoderDiagnostics> restricted_decode(
    const LocalEnsemble& e, const VertexSet& t_set, const RestrictedOptions& opt,
    RandomStream& rng);

/// Pr over S of f_S != G|_S (any pointwise difference on bind(S)).
McEstimate disagreement_rate(const LocalEnsemble& e, const GlobalFunction& g,
                             bool exact, std::uint64_t samples, RandomStream& rng,
                             const VoteDist& regime = VoteDist::uniform(),
                             double max_exact_cost = 2e7);

/// Diagnostic divergence of two restricted decodes: Pr over sampled
/// S ⊇ T1 ∪ T2 of g_{T1}|_S != g_{T2}|_S. Counts 1 for a pair whose decoder
/// aborted (g = ⊥ explains nothing).
McEstimate restricted_pair_divergence(const LocalEnsemble& e, const VertexSet& t1,
                                      const VertexSet& t2, const RestrictedOptions& opt,
                                      std::uint64_t samples, RandomStream& rng);

}  // namespace agl
