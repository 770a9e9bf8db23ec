#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "agreelab/combinatorics.hpp"
#include "agreelab/params.hpp"
#include "agreelab/rng.hpp"
#include "agreelab/vertex_set.hpp"

namespace agl {

/// Shared shape of an ensemble; t is not part of it (the testing distribution
/// supplies t), so TestParams are assembled on demand.
struct EnsembleParams {
  unsigned n = 0;
  unsigned k = 0;
  unsigned d = 1;
  unsigned alphabet_size = 2;
  bool include_empty = false;

  TestParams test_params(unsigned t) const { return TestParams{n, k, t, d, alphabet_size}; }
  void validate() const;
};

/// A total map from subsets of [n] of size 1..d (optionally 0) to symbols.
/// Lookups go through a dense rank table for d <= 3; the key map is the
/// canonical source for serialization.
class GlobalFunction {
 public:
  GlobalFunction() = default;
  GlobalFunction(unsigned n, unsigned d, unsigned alphabet_size, bool include_empty,
                 std::unordered_map<Mask128, std::uint16_t, Mask128Hash> values);

  static GlobalFunction random(unsigned n, unsigned d, unsigned alphabet_size, bool include_empty,
                               RandomStream& rng);

  unsigned n() const { return n_; }
  unsigned d() const { return d_; }
  unsigned alphabet_size() const { return alphabet_size_; }
  bool include_empty() const { return include_empty_; }
  std::size_t domain_size() const { return values_.size(); }
  const std::unordered_map<Mask128, std::uint16_t, Mask128Hash>& values() const { return values_; }

  std::uint16_t eval(const Mask128& a) const;

  friend bool operator==(const GlobalFunction& x, const GlobalFunction& y) {
    return x.n_ == y.n_ && x.d_ == y.d_ && x.alphabet_size_ == y.alphabet_size_ &&
           x.include_empty_ == y.include_empty_ && x.values_ == y.values_;
  }

 private:
  void build_dense();

  unsigned n_ = 0, d_ = 1, alphabet_size_ = 2;
  bool include_empty_ = false;
  std::unordered_map<Mask128, std::uint16_t, Mask128Hash> values_;
  std::vector<std::uint16_t> dense_;  // rank-indexed when d <= 3
  bool dense_valid_ = false;
  std::uint16_t empty_value_ = 0;
};

/// One local table: the restriction domain in canonical order plus values.
struct LocalFunction {
  VertexSet s;
  unsigned d = 1;
  unsigned alphabet_size = 2;
  bool include_empty = false;
  std::vector<Mask128> points;
  std::vector<std::uint16_t> values;

  std::uint16_t eval(const Mask128& a) const;

  friend bool operator==(const LocalFunction& x, const LocalFunction& y) {
    return x.s == y.s && x.points == y.points && x.values == y.values;
  }
};

/// Experimental noise applied to a global ensemble.
struct CorruptionSpec {
  enum class Mode { none, replace_set, flip_entry, planted_disagreement };
  Mode mode = Mode::none;
  double rate = 0.0;
  std::vector<VertexSet> planted;  // designated d-sets, planted_disagreement only

  void validate(unsigned d) const;
  static const char* mode_name(Mode m);
  static Mode mode_from_name(const std::string& name);
};

/// Ensemble of local functions {f_S}. Implicit backing derives every value
/// deterministically from (global function, corruption spec, seed) via keyed
/// hashes, so a set S is corrupted consistently across estimators and no
/// table is ever fully materialized. Explicit backing stores tables.
class LocalEnsemble {
 public:
  enum class Backing { implicit, explicit_tables };

  static LocalEnsemble from_global(GlobalFunction f, unsigned k);
  static LocalEnsemble from_tables(EnsembleParams params,
                                   std::vector<LocalFunction> tables);

  Backing backing() const { return backing_; }
  const EnsembleParams& params() const { return params_; }

  /// f_S(A). A must satisfy A ⊆ S and the size bounds; Implicit backing
  /// accepts any S (the biased regime uses sets of every size), explicit
  /// backing requires a stored S.
  std::uint16_t eval(const Mask128& s, const Mask128& a) const;

  LocalFunction materialize_local(const VertexSet& s) const;

  /// New ensemble with the corruption applied. Implicit ensembles must be
  /// uncorrupted (the generator records exactly one corruption stage);
  /// explicit ensembles are rewritten eagerly.
  LocalEnsemble corrupted(const CorruptionSpec& spec, RandomStream& rng) const;

  /// Explicit copy with all C(n,k) tables materialized (guarded).
  LocalEnsemble materialize_explicit(double max_tables = 1e5) const;

  /// Explicit backing only: replace one table (used to build adversarial
  /// instances in tests).
  void set_local(LocalFunction f);

  const GlobalFunction& global() const;  // implicit backing only
  const CorruptionSpec& corruption() const { return corruption_; }
  std::uint64_t seed() const { return seed_; }
  const std::map<Mask128, LocalFunction, bool (*)(const Mask128&, const Mask128&)>& tables() const {
    return tables_;
  }

  std::string to_json() const;
  static LocalEnsemble from_json(const std::string& text);
  void save(const std::string& path) const;
  static LocalEnsemble load(const std::string& path);

 private:
  LocalEnsemble();

  Backing backing_ = Backing::implicit;
  EnsembleParams params_;
  GlobalFunction global_;
  CorruptionSpec corruption_;
  std::uint64_t seed_ = 0;
  std::map<Mask128, LocalFunction, bool (*)(const Mask128&, const Mask128&)> tables_;
};

}  // namespace agl
