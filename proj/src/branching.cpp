#include "agreelab/branching.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "agreelab/errors.hpp"

namespace agl {

namespace {

// All nonempty subsets of the edges, plus the empty set, deduplicated and
// lex-sorted so the first violation reported is deterministic.
std::vector<Mask128> candidate_sets(const Hypergraph& h) {
  std::unordered_set<Mask128, Mask128Hash> seen;
  std::vector<Mask128> out;
  out.push_back(Mask128::empty_set());
  seen.insert(Mask128::empty_set());
  for (const auto& e : h.edges()) {
    const auto& mem = e.members();
    const unsigned sz = e.size();
    if (sz > 20) throw parameter_error("check_branching: edge size > 20 unsupported");
    for (std::uint32_t bits = 1; bits < (1u << sz); ++bits) {
      Mask128 a;
      for (unsigned i = 0; i < sz; ++i)
        if (bits & (1u << i)) a.set(mem[i]);
      if (seen.insert(a).second) out.push_back(a);
    }
  }
  std::sort(out.begin(), out.end(), [](const Mask128& x, const Mask128& y) {
    if (x.count() != y.count()) return x.count() < y.count();
    return lex_less(x, y);
  });
  return out;
}

// counts[r] = number of edges of cardinality |a|+r containing a.
std::vector<std::size_t> extension_histogram(const Hypergraph& h, const Mask128& a) {
  std::vector<std::size_t> counts;
  const unsigned base = a.count();
  for (const auto& e : h.edges()) {
    if (!a.subset_of(e.mask())) continue;
    const unsigned r = e.size() - base;
    if (counts.size() <= r) counts.resize(r + 1, 0);
    ++counts[r];
  }
  return counts;
}

}  // namespace

BranchingReport check_branching(const Hypergraph& h, double rho) {
  if (rho < 1.0) throw parameter_error("check_branching: need rho >= 1");
  BranchingReport report;
  report.rho = rho;
  for (const Mask128& a : candidate_sets(h)) {
    const auto counts = extension_histogram(h, a);
    for (unsigned r = 0; r < counts.size(); ++r) {
      if (static_cast<double>(counts[r]) > std::pow(rho, r) + 1e-9) {
        report.ok = false;
        report.witness = BranchingWitness{VertexSet(a), r, counts[r]};
        return report;
      }
    }
  }
  return report;
}

double minimal_branching_factor(const Hypergraph& h) {
  double rho = 1.0;
  for (const Mask128& a : candidate_sets(h)) {
    const auto counts = extension_histogram(h, a);
    for (unsigned r = 1; r < counts.size(); ++r)
      if (counts[r] > 0)
        rho = std::max(rho, std::pow(static_cast<double>(counts[r]), 1.0 / r));
  }
  return rho;
}

}  // namespace agl
