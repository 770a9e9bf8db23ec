#include "agreelab/vertex_set.hpp"

#include <algorithm>

#include "agreelab/errors.hpp"

namespace agl {

VertexSet::VertexSet(std::initializer_list<unsigned> members)
    : VertexSet(std::vector<unsigned>(members)) {}

VertexSet::VertexSet(std::vector<unsigned> members) {
  std::sort(members.begin(), members.end());
  members_.reserve(members.size());
  for (unsigned v : members) {
    if (v >= Mask128::capacity)
      throw parameter_error("vertex index " + std::to_string(v) + " exceeds supported ground-set cap 128");
    if (mask_.test(v)) throw parameter_error("duplicate vertex " + std::to_string(v));
    mask_.set(v);
    members_.push_back(static_cast<std::uint16_t>(v));
  }
}

VertexSet::VertexSet(const Mask128& mask) : mask_(mask) {
  members_.reserve(mask.count());
  mask.for_each([&](unsigned i) { members_.push_back(static_cast<std::uint16_t>(i)); });
}

VertexSet VertexSet::range(unsigned n) { return VertexSet(Mask128::full(n)); }

unsigned VertexSet::max_member() const {
  if (members_.empty()) throw parameter_error("max_member on empty set");
  return members_.back();
}

std::string VertexSet::to_key() const {
  std::string out;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(members_[i]);
  }
  return out;
}

std::vector<unsigned> complement_members(const Mask128& s, unsigned n) {
  std::vector<unsigned> out;
  out.reserve(n - s.count());
  for (unsigned i = 0; i < n; ++i)
    if (!s.test(i)) out.push_back(i);
  return out;
}

}  // namespace agl
