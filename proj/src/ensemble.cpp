#include "agreelab/ensemble.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "agreelab/errors.hpp"

namespace agl {

namespace {

constexpr std::uint64_t kSaltSelect = 0xA11CE5E1ull;
constexpr std::uint64_t kSaltValue = 0x5EEDF00Dull;
constexpr std::uint64_t kSaltFlip = 0xF11BBEEFull;
constexpr std::uint64_t kSaltPlant = 0x9B5A17EDull;

std::uint16_t different_symbol(std::uint16_t base, std::uint64_t h, unsigned sigma) {
  const auto offset = 1 + detail::splitmix64(h ^ 0xD1FFull) % (sigma - 1);
  return static_cast<std::uint16_t>((base + offset) % sigma);
}

// Rank of a subset of size 1..3 within the canonical (size asc, lex) order.
std::size_t rank_small(const Mask128& a, unsigned n) {
  unsigned v[3];
  unsigned cnt = 0;
  a.for_each([&](unsigned x) { v[cnt++] = x; });
  auto c2 = [](unsigned m) { return static_cast<std::size_t>(m) * (m - 1) / 2; };
  auto c3 = [](unsigned m) {
    return static_cast<std::size_t>(m) * (m - 1) / 2 * (m - 2) / 3;
  };
  auto pair_rank = [&](unsigned a1, unsigned a2, unsigned m) {
    return static_cast<std::size_t>(a1) * (2 * m - a1 - 1) / 2 + (a2 - a1 - 1);
  };
  switch (cnt) {
    case 1:
      return v[0];
    case 2:
      return n + pair_rank(v[0], v[1], n);
    default:
      return n + c2(n) + (c3(n) - c3(n - v[0])) +
             pair_rank(v[1] - v[0] - 1, v[2] - v[0] - 1, n - v[0] - 1);
  }
}

VertexSet parse_key(const std::string& key) {
  if (key.empty()) return VertexSet{};
  std::vector<unsigned> vs;
  std::istringstream in(key);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) throw parse_error("ensemble: malformed set key '" + key + "'");
    vs.push_back(static_cast<unsigned>(std::stoul(tok)));
  }
  return VertexSet(std::move(vs));
}

bool mask_lex_less(const Mask128& a, const Mask128& b) { return lex_less(a, b); }

}  // namespace

void EnsembleParams::validate() const {
  TestParams{n, k, 0, d, alphabet_size}.validate();
  if (k < d) throw parameter_error("ensemble: need k >= d");
}

GlobalFunction::GlobalFunction(unsigned n, unsigned d, unsigned alphabet_size, bool include_empty,
                               std::unordered_map<Mask128, std::uint16_t, Mask128Hash> values)
    : n_(n), d_(d), alphabet_size_(alphabet_size), include_empty_(include_empty),
      values_(std::move(values)) {
  std::size_t expected = include_empty_ ? 1 : 0;
  for (unsigned s = 1; s <= d_ && s <= n_; ++s) expected += static_cast<std::size_t>(binomial(n_, s));
  if (values_.size() != expected)
    throw parameter_error("global function not total: has " + std::to_string(values_.size()) +
                          " values, domain needs " + std::to_string(expected));
  for (const auto& [a, sym] : values_) {
    const unsigned sz = a.count();
    if (sz > d_ || (sz == 0 && !include_empty_))
      throw parameter_error("global function key outside size bounds");
    if (!a.subset_of(Mask128::full(n_))) throw parameter_error("global function key outside [0,n)");
    if (sym >= alphabet_size_) throw parameter_error("global function symbol out of range");
  }
  build_dense();
}

void GlobalFunction::build_dense() {
  dense_valid_ = d_ <= 3;
  if (!dense_valid_) return;
  std::size_t total = 0;
  for (unsigned s = 1; s <= d_ && s <= n_; ++s) total += static_cast<std::size_t>(binomial(n_, s));
  dense_.assign(total, 0);
  for (const auto& [a, sym] : values_) {
    if (a.empty())
      empty_value_ = sym;
    else
      dense_[rank_small(a, n_)] = sym;
  }
}

std::uint16_t GlobalFunction::eval(const Mask128& a) const {
  if (dense_valid_) {
    if (a.empty()) {
      if (!include_empty_) throw structural_error("global function: empty set not in domain");
      return empty_value_;
    }
    return dense_[rank_small(a, n_)];
  }
  const auto it = values_.find(a);
  if (it == values_.end()) throw structural_error("global function: point not in domain");
  return it->second;
}

GlobalFunction GlobalFunction::random(unsigned n, unsigned d, unsigned alphabet_size,
                                      bool include_empty, RandomStream& rng) {
  std::unordered_map<Mask128, std::uint16_t, Mask128Hash> values;
  for_each_small_subset(Mask128::full(n), d, include_empty, [&](const Mask128& a) {
    values[a] = static_cast<std::uint16_t>(rng.next_below(alphabet_size));
  });
  return GlobalFunction(n, d, alphabet_size, include_empty, std::move(values));
}

std::uint16_t LocalFunction::eval(const Mask128& a) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i] == a) return values[i];
  throw structural_error("local function: point not in domain");
}

void CorruptionSpec::validate(unsigned d) const {
  if (!(rate >= 0.0 && rate <= 1.0)) throw parameter_error("corruption rate outside [0,1]");
  if (mode == Mode::planted_disagreement) {
    if (planted.empty()) throw parameter_error("planted_disagreement needs a designated set D");
    for (const auto& a : planted)
      if (a.size() == 0 || a.size() > d)
        throw parameter_error("planted set size outside [1,d]");
  } else if (!planted.empty()) {
    throw parameter_error("planted sets only apply to planted_disagreement");
  }
}

const char* CorruptionSpec::mode_name(Mode m) {
  switch (m) {
    case Mode::none: return "none";
    case Mode::replace_set: return "replace_set";
    case Mode::flip_entry: return "flip_entry";
    default: return "planted_disagreement";
  }
}

CorruptionSpec::Mode CorruptionSpec::mode_from_name(const std::string& name) {
  if (name == "none") return Mode::none;
  if (name == "replace_set") return Mode::replace_set;
  if (name == "flip_entry") return Mode::flip_entry;
  if (name == "planted_disagreement") return Mode::planted_disagreement;
  throw parse_error("unknown corruption mode: " + name);
}

LocalEnsemble::LocalEnsemble() : tables_(&mask_lex_less) {}

LocalEnsemble LocalEnsemble::from_global(GlobalFunction f, unsigned k) {
  LocalEnsemble e;
  e.backing_ = Backing::implicit;
  e.params_ = EnsembleParams{f.n(), k, f.d(), f.alphabet_size(), f.include_empty()};
  e.params_.validate();
  e.global_ = std::move(f);
  return e;
}

LocalEnsemble LocalEnsemble::from_tables(EnsembleParams params, std::vector<LocalFunction> tables) {
  params.validate();
  LocalEnsemble e;
  e.backing_ = Backing::explicit_tables;
  e.params_ = params;
  for (auto& t : tables) {
    if (t.s.size() != params.k) throw parameter_error("explicit table with |S| != k");
    const auto expected = small_subsets(t.s.mask(), params.d, params.include_empty);
    if (t.points != expected) throw parameter_error("explicit table domain not canonical/total");
    e.tables_.emplace(t.s.mask(), std::move(t));
  }
  return e;
}

std::uint16_t LocalEnsemble::eval(const Mask128& s, const Mask128& a) const {
  assert(a.subset_of(s) && a.count() <= params_.d);
  if (backing_ == Backing::explicit_tables) {
    const auto it = tables_.find(s);
    if (it == tables_.end()) throw structural_error("explicit ensemble: no table for S");
    return it->second.eval(a);
  }
  switch (corruption_.mode) {
    case CorruptionSpec::Mode::none:
      return global_.eval(a);
    case CorruptionSpec::Mode::replace_set: {
      if (hash_below(keyed_set_hash(seed_, s, kSaltSelect), corruption_.rate))
        return static_cast<std::uint16_t>(keyed_pair_hash(seed_, s, a, kSaltValue) %
                                          params_.alphabet_size);
      return global_.eval(a);
    }
    case CorruptionSpec::Mode::flip_entry: {
      const std::uint16_t base = global_.eval(a);
      const std::uint64_t h = keyed_pair_hash(seed_, s, a, kSaltFlip);
      if (hash_below(h, corruption_.rate))
        return different_symbol(base, h, params_.alphabet_size);
      return base;
    }
    default: {
      const std::uint16_t base = global_.eval(a);
      bool designated = false;
      for (const auto& dset : corruption_.planted)
        if (dset.mask() == a) {
          designated = true;
          break;
        }
      if (!designated) return base;
      const std::uint64_t h = keyed_pair_hash(seed_, s, a, kSaltPlant);
      if (hash_below(h, corruption_.rate))
        return different_symbol(base, h, params_.alphabet_size);
      return base;
    }
  }
}

LocalFunction LocalEnsemble::materialize_local(const VertexSet& s) const {
  if (s.size() != params_.k)
    throw parameter_error("materialize_local: |S| = " + std::to_string(s.size()) +
                          " but k = " + std::to_string(params_.k));
  LocalFunction f;
  f.s = s;
  f.d = params_.d;
  f.alphabet_size = params_.alphabet_size;
  f.include_empty = params_.include_empty;
  f.points = small_subsets(s.mask(), params_.d, params_.include_empty);
  f.values.reserve(f.points.size());
  for (const auto& a : f.points) f.values.push_back(eval(s.mask(), a));
  return f;
}

LocalEnsemble LocalEnsemble::corrupted(const CorruptionSpec& spec, RandomStream& rng) const {
  spec.validate(params_.d);
  if (backing_ == Backing::implicit) {
    if (corruption_.mode != CorruptionSpec::Mode::none && spec.mode != CorruptionSpec::Mode::none)
      throw parameter_error("ensemble already corrupted; the generator records one corruption stage");
    LocalEnsemble e = *this;
    e.corruption_ = spec;
    e.seed_ = rng.next_u64();
    return e;
  }
  LocalEnsemble e = *this;
  const unsigned sigma = params_.alphabet_size;
  for (auto& [mask, table] : e.tables_) {
    switch (spec.mode) {
      case CorruptionSpec::Mode::none:
        break;
      case CorruptionSpec::Mode::replace_set:
        if (rng.bernoulli(spec.rate))
          for (auto& v : table.values) v = static_cast<std::uint16_t>(rng.next_below(sigma));
        break;
      case CorruptionSpec::Mode::flip_entry:
        for (auto& v : table.values)
          if (rng.bernoulli(spec.rate))
            v = static_cast<std::uint16_t>((v + 1 + rng.next_below(sigma - 1)) % sigma);
        break;
      default:
        for (std::size_t i = 0; i < table.points.size(); ++i) {
          bool designated = false;
          for (const auto& dset : spec.planted)
            if (dset.mask() == table.points[i]) {
              designated = true;
              break;
            }
          if (designated && rng.bernoulli(spec.rate))
            table.values[i] = static_cast<std::uint16_t>(
                (table.values[i] + 1 + rng.next_below(sigma - 1)) % sigma);
        }
        break;
    }
  }
  return e;
}

LocalEnsemble LocalEnsemble::materialize_explicit(double max_tables) const {
  const double total = binomial(params_.n, params_.k);
  if (total > max_tables)
    throw exact_infeasible_error("materialize_explicit: C(n,k) exceeds table guard");
  std::vector<LocalFunction> tables;
  tables.reserve(static_cast<std::size_t>(total));
  for_each_k_subset(params_.n, params_.k,
                    [&](const Mask128& s) { tables.push_back(materialize_local(VertexSet(s))); });
  return from_tables(params_, std::move(tables));
}

void LocalEnsemble::set_local(LocalFunction f) {
  if (backing_ != Backing::explicit_tables)
    throw parameter_error("set_local requires explicit backing");
  if (f.s.size() != params_.k) throw parameter_error("set_local: |S| != k");
  const auto expected = small_subsets(f.s.mask(), params_.d, params_.include_empty);
  if (f.points != expected) throw parameter_error("set_local: non-canonical domain");
  tables_.insert_or_assign(f.s.mask(), std::move(f));
}

const GlobalFunction& LocalEnsemble::global() const {
  if (backing_ != Backing::implicit)
    throw parameter_error("explicit ensemble has no generator global function");
  return global_;
}

std::string LocalEnsemble::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = params_.n;
  j["k"] = params_.k;
  j["d"] = params_.d;
  j["alphabet_size"] = params_.alphabet_size;
  j["include_empty"] = params_.include_empty;
  if (backing_ == Backing::implicit) {
    j["kind"] = "implicit";
    nlohmann::ordered_json g;
    for_each_small_subset(Mask128::full(params_.n), params_.d, params_.include_empty,
                          [&](const Mask128& a) { g[VertexSet(a).to_key()] = global_.eval(a); });
    j["global"] = std::move(g);
    nlohmann::ordered_json c;
    c["mode"] = CorruptionSpec::mode_name(corruption_.mode);
    c["rate"] = corruption_.rate;
    if (corruption_.mode == CorruptionSpec::Mode::planted_disagreement) {
      nlohmann::ordered_json planted = nlohmann::ordered_json::array();
      for (const auto& a : corruption_.planted) planted.push_back(a.to_key());
      c["planted"] = std::move(planted);
    }
    j["corruption"] = std::move(c);
    j["seed"] = seed_;
  } else {
    j["kind"] = "explicit";
    nlohmann::ordered_json locals = nlohmann::ordered_json::array();
    for (const auto& [mask, table] : tables_) {
      nlohmann::ordered_json rec;
      rec["S"] = table.s.members();
      nlohmann::ordered_json f;
      for (std::size_t i = 0; i < table.points.size(); ++i)
        f[VertexSet(table.points[i]).to_key()] = table.values[i];
      rec["f"] = std::move(f);
      locals.push_back(std::move(rec));
    }
    j["locals"] = std::move(locals);
  }
  return j.dump(2) + "\n";
}

LocalEnsemble LocalEnsemble::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("ensemble JSON: ") + e.what());
  }
  try {
    EnsembleParams params;
    params.n = j.at("n").get<unsigned>();
    params.k = j.at("k").get<unsigned>();
    params.d = j.at("d").get<unsigned>();
    params.alphabet_size = j.at("alphabet_size").get<unsigned>();
    params.include_empty = j.value("include_empty", false);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "implicit") {
      std::unordered_map<Mask128, std::uint16_t, Mask128Hash> values;
      for (const auto& [key, val] : j.at("global").items())
        values[parse_key(key).mask()] = val.get<std::uint16_t>();
      GlobalFunction g(params.n, params.d, params.alphabet_size, params.include_empty,
                       std::move(values));
      LocalEnsemble e = from_global(std::move(g), params.k);
      const auto& c = j.at("corruption");
      CorruptionSpec spec;
      spec.mode = CorruptionSpec::mode_from_name(c.at("mode").get<std::string>());
      spec.rate = c.at("rate").get<double>();
      if (c.contains("planted"))
        for (const auto& key : c.at("planted")) spec.planted.push_back(parse_key(key.get<std::string>()));
      spec.validate(params.d);
      e.corruption_ = spec;
      e.seed_ = j.at("seed").get<std::uint64_t>();
      return e;
    }
    if (kind != "explicit") throw parse_error("ensemble: unknown kind '" + kind + "'");
    std::vector<LocalFunction> tables;
    for (const auto& rec : j.at("locals")) {
      LocalFunction f;
      f.s = VertexSet(rec.at("S").get<std::vector<unsigned>>());
      f.d = params.d;
      f.alphabet_size = params.alphabet_size;
      f.include_empty = params.include_empty;
      f.points = small_subsets(f.s.mask(), params.d, params.include_empty);
      f.values.assign(f.points.size(), 0);
      const auto& fob = rec.at("f");
      std::size_t seen = 0;
      for (std::size_t i = 0; i < f.points.size(); ++i) {
        const std::string key = VertexSet(f.points[i]).to_key();
        if (!fob.contains(key)) throw parse_error("ensemble: table for S missing point " + key);
        f.values[i] = fob.at(key).get<std::uint16_t>();
        if (f.values[i] >= params.alphabet_size) throw parse_error("ensemble: symbol out of range");
        ++seen;
      }
      if (fob.size() != seen) throw parse_error("ensemble: table has extraneous points");
      tables.push_back(std::move(f));
    }
    return from_tables(params, std::move(tables));
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("ensemble JSON: ") + e.what());
  }
}

void LocalEnsemble::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write ensemble file: " + path);
  out << to_json();
}

LocalEnsemble LocalEnsemble::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open ensemble file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace agl
