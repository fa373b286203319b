#include "cardiocausal/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace cardiocausal {

Dag::Dag(std::size_t nodes) : parents_(nodes, 0U) {
  if (nodes > kMaxNodes) throw std::invalid_argument("Dag supports at most 32 nodes");
}

std::size_t Dag::parent_count(std::size_t node) const {
  return static_cast<std::size_t>(std::popcount(parents_[node]));
}

bool Dag::reaches(std::size_t from, std::size_t to) const {
  // Follows children: a child c of v has bit v in parents_[c].
  std::uint32_t seen = 1U << from;
  std::vector<std::size_t> stack{from};
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (std::size_t c = 0; c < size(); ++c) {
      if (((parents_[c] >> v) & 1U) && !((seen >> c) & 1U)) {
        seen |= 1U << c;
        stack.push_back(c);
      }
    }
  }
  return false;
}

bool Dag::can_add(std::size_t from, std::size_t to) const {
  if (from == to || from >= size() || to >= size()) return false;
  if (adjacent(from, to)) return false;
  return !reaches(to, from);
}

void Dag::add_edge(std::size_t from, std::size_t to) {
  if (from >= size() || to >= size()) throw std::invalid_argument("edge endpoint out of range");
  if (from == to) throw std::invalid_argument("self-loop");
  if (has_edge(from, to)) throw std::invalid_argument("duplicate edge");
  if (reaches(to, from)) throw std::invalid_argument("edge would create a cycle");
  parents_[to] |= 1U << from;
}

void Dag::remove_edge(std::size_t from, std::size_t to) { parents_[to] &= ~(1U << from); }

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = 0; b < size(); ++b) {
      if (has_edge(a, b)) out.push_back({a, b});
    }
  }
  return out;
}

std::size_t Dag::edge_count() const {
  std::size_t k = 0;
  for (auto m : parents_) k += static_cast<std::size_t>(std::popcount(m));
  return k;
}

std::vector<std::size_t> Dag::topological_order() const {
  std::vector<std::size_t> order;
  std::uint32_t placed = 0;
  while (order.size() < size()) {
    bool progressed = false;
    for (std::size_t v = 0; v < size(); ++v) {
      if (!((placed >> v) & 1U) && (parents_[v] & ~placed) == 0U) {
        placed |= 1U << v;
        order.push_back(v);
        progressed = true;
        break;
      }
    }
    if (!progressed) return {};
  }
  return order;
}

Pdag::Pdag(std::size_t nodes) : n_(nodes), m_(nodes * nodes, 0) {}

Pdag::Pdag(const Dag& dag) : Pdag(dag.size()) {
  for (const auto& e : dag.edges()) add_directed(e.from, e.to);
}

void Pdag::add_directed(std::size_t from, std::size_t to) {
  m_[from * n_ + to] = 1;
  m_[to * n_ + from] = 0;
}

void Pdag::add_undirected(std::size_t a, std::size_t b) {
  m_[a * n_ + b] = 1;
  m_[b * n_ + a] = 1;
}

void Pdag::remove(std::size_t a, std::size_t b) {
  m_[a * n_ + b] = 0;
  m_[b * n_ + a] = 0;
}

void Pdag::orient(std::size_t from, std::size_t to) { add_directed(from, to); }

std::vector<std::size_t> Pdag::neighbors(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n_; ++u) {
    if (u != v && undirected(u, v)) out.push_back(u);
  }
  return out;
}

std::vector<std::size_t> Pdag::parents(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n_; ++u) {
    if (directed(u, v)) out.push_back(u);
  }
  return out;
}

std::vector<std::size_t> Pdag::adjacents(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n_; ++u) {
    if (u != v && adjacent(u, v)) out.push_back(u);
  }
  return out;
}

std::vector<Edge> Pdag::directed_edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      if (directed(a, b)) out.push_back({a, b});
    }
  }
  return out;
}

std::vector<Edge> Pdag::undirected_edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) {
      if (undirected(a, b)) out.push_back({a, b});
    }
  }
  return out;
}

namespace {

bool meek_pass(Pdag& g) {
  const auto n = g.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !g.undirected(a, b)) continue;
      // R1: c -> a - b, c and b nonadjacent.
      for (std::size_t c = 0; c < n; ++c) {
        if (c != b && g.directed(c, a) && !g.adjacent(c, b)) {
          g.orient(a, b);
          return true;
        }
      }
      // R2: a -> c -> b with a - b.
      for (std::size_t c = 0; c < n; ++c) {
        if (g.directed(a, c) && g.directed(c, b)) {
          g.orient(a, b);
          return true;
        }
      }
      // R3: a - c -> b, a - d -> b, c and d nonadjacent.
      for (std::size_t c = 0; c < n; ++c) {
        if (!(g.undirected(a, c) && g.directed(c, b))) continue;
        for (std::size_t d = c + 1; d < n; ++d) {
          if (g.undirected(a, d) && g.directed(d, b) && !g.adjacent(c, d)) {
            g.orient(a, b);
            return true;
          }
        }
      }
      // R4: a - d -> c -> b, a adjacent to c, d and b nonadjacent.
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a || !g.directed(c, b) || !g.adjacent(a, c)) continue;
        for (std::size_t d = 0; d < n; ++d) {
          if (d != b && g.undirected(a, d) && g.directed(d, c) && !g.adjacent(d, b)) {
            g.orient(a, b);
            return true;
          }
        }
      }
    }
  }
  return false;
}

}  // namespace

void apply_meek_rules(Pdag& g) {
  while (meek_pass(g)) {
  }
}

Cpdag cpdag_of(const Dag& dag) {
  const auto n = dag.size();
  Pdag g(n);
  for (const auto& e : dag.edges()) g.add_undirected(e.from, e.to);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!dag.has_edge(a, c)) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (dag.has_edge(b, c) && !dag.adjacent(a, b)) {
          g.orient(a, c);
          g.orient(b, c);
        }
      }
    }
  }
  apply_meek_rules(g);
  return g;
}

std::optional<Dag> consistent_extension(const Pdag& pdag) {
  const auto n = pdag.size();
  Pdag g = pdag;
  Dag out(n);
  for (const auto& e : pdag.directed_edges()) out.add_edge(e.from, e.to);
  std::vector<bool> removed(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    bool found = false;
    for (std::size_t x = 0; x < n && !found; ++x) {
      if (removed[x]) continue;
      bool sink = true;
      for (std::size_t y = 0; y < n; ++y) {
        if (!removed[y] && g.directed(x, y)) sink = false;
      }
      if (!sink) continue;
      const auto adj = g.adjacents(x);
      bool ok = true;
      for (auto y : g.neighbors(x)) {
        for (auto z : adj) {
          if (z != y && !g.adjacent(y, z)) ok = false;
        }
      }
      if (!ok) continue;
      for (auto y : g.neighbors(x)) {
        if (!out.can_add(y, x)) return std::nullopt;
        out.add_edge(y, x);
      }
      for (std::size_t y = 0; y < n; ++y) g.remove(x, y);
      removed[x] = true;
      found = true;
    }
    if (!found) return std::nullopt;
  }
  return out;
}

MixedGraph MixedGraph::from(const Dag& dag) { return {dag.size(), dag.edges(), {}}; }

MixedGraph MixedGraph::from(const Pdag& pdag) {
  return {pdag.size(), pdag.directed_edges(), pdag.undirected_edges()};
}

std::string to_dot(const MixedGraph& g, const std::vector<std::string>& names, const std::string& graph_name) {
  if (names.size() != g.nodes) throw std::invalid_argument("node name count does not match graph");
  std::ostringstream os;
  os << "digraph \"" << graph_name << "\" {\n";
  for (const auto& name : names) os << "  \"" << name << "\";\n";
  for (const auto& e : g.directed) os << "  \"" << names[e.from] << "\" -> \"" << names[e.to] << "\";\n";
  for (const auto& e : g.undirected) {
    os << "  \"" << names[e.from] << "\" -> \"" << names[e.to] << "\" [dir=none];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cardiocausal
