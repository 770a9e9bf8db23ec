#include "agreelab/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "agreelab/errors.hpp"

namespace agl {

Hypergraph::Hypergraph(unsigned n, std::vector<VertexSet> edges, bool allow_empty_edge) : n_(n) {
  if (n > Mask128::capacity) throw parameter_error("hypergraph ground set > 128 not supported");
  for (const auto& e : edges) {
    if (e.empty() && !allow_empty_edge) throw parameter_error("empty hyperedge");
    if (!e.empty() && e.max_member() >= n)
      throw parameter_error("edge vertex " + std::to_string(e.max_member()) +
                            " outside ground set [0," + std::to_string(n) + ")");
  }
  std::sort(edges.begin(), edges.end(),
            [](const VertexSet& a, const VertexSet& b) { return lex_less(a, b); });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  lo_.reserve(edges_.size());
  hi_.reserve(edges_.size());
  for (const auto& e : edges_) {
    lo_.push_back(e.mask().lo);
    hi_.push_back(e.mask().hi);
  }
}

unsigned Hypergraph::uniformity() const {
  unsigned u = 0;
  for (const auto& e : edges_) u = std::max(u, e.size());
  return u;
}

bool Hypergraph::is_uniform(unsigned d) const {
  for (const auto& e : edges_)
    if (e.size() != d) return false;
  return true;
}

bool Hypergraph::contains_edge(const Mask128& e) const {
  for (const auto& f : edges_)
    if (f.mask() == e) return true;
  return false;
}

Hypergraph restrict_to(const Hypergraph& h, const VertexSet& s) {
  std::vector<VertexSet> kept;
  for (const auto& e : h.edges())
    if (e.mask().subset_of(s.mask())) kept.push_back(e);
  return Hypergraph(h.ground_size(), std::move(kept), true);
}

Hypergraph link_delete(const Hypergraph& h, const VertexSet& a) {
  std::vector<VertexSet> out;
  out.reserve(h.edge_count());
  for (const auto& e : h.edges()) {
    const Mask128 r = e.mask() - a.mask();
    if (!r.empty()) out.emplace_back(r);
  }
  return Hypergraph(h.ground_size(), std::move(out));
}

Hypergraph relabel_without(const Hypergraph& h, const VertexSet& drop) {
  std::vector<unsigned> new_index(h.ground_size(), 0);
  unsigned next = 0;
  for (unsigned v = 0; v < h.ground_size(); ++v) {
    new_index[v] = next;
    if (!drop.contains(v)) ++next;
  }
  std::vector<VertexSet> out;
  out.reserve(h.edge_count());
  for (const auto& e : h.edges()) {
    if (e.mask().intersects(drop.mask()))
      throw parameter_error("relabel_without: edge intersects dropped vertices");
    std::vector<unsigned> members;
    members.reserve(e.size());
    for (unsigned v : e.members()) members.push_back(new_index[v]);
    out.emplace_back(std::move(members));
  }
  return Hypergraph(next, std::move(out), true);
}

Hypergraph parse_hypergraph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  unsigned lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw parse_error("hypergraph: empty input");
  std::istringstream head(line);
  long n = -1, m = -1;
  if (!(head >> n >> m) || n < 0 || m < 0)
    throw parse_error("hypergraph line " + std::to_string(lineno) + ": expected header 'n m'");
  std::vector<VertexSet> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    if (!next_line())
      throw parse_error("hypergraph: expected " + std::to_string(m) + " edges, got " +
                        std::to_string(i));
    std::istringstream row(line);
    std::vector<unsigned> vs;
    long v;
    while (row >> v) {
      if (v < 0 || v >= n)
        throw parse_error("hypergraph line " + std::to_string(lineno) + ": vertex " +
                          std::to_string(v) + " outside [0," + std::to_string(n) + ")");
      vs.push_back(static_cast<unsigned>(v));
    }
    if (!row.eof())
      throw parse_error("hypergraph line " + std::to_string(lineno) + ": malformed vertex index");
    if (vs.empty()) throw parse_error("hypergraph line " + std::to_string(lineno) + ": empty edge");
    try {
      edges.emplace_back(std::move(vs));
    } catch (const parameter_error& e) {
      throw parse_error("hypergraph line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return Hypergraph(static_cast<unsigned>(n), std::move(edges));
}

std::string format_hypergraph(const Hypergraph& h) {
  std::string out =
      std::to_string(h.ground_size()) + " " + std::to_string(h.edge_count()) + "\n";
  for (const auto& e : h.edges()) {
    for (std::size_t i = 0; i < e.members().size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(e.members()[i]);
    }
    out += '\n';
  }
  return out;
}

Hypergraph load_hypergraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open hypergraph file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_hypergraph(buf.str());
}

void save_hypergraph(const Hypergraph& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write hypergraph file: " + path);
  out << format_hypergraph(h);
}

}  // namespace agl
