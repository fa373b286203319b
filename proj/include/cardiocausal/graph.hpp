#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cardiocausal {

/// Ordered pair of node indices.
struct Edge {
  std::size_t from;
  std::size_t to;
  auto operator<=>(const Edge&) const = default;
};

/// Directed acyclic graph over nodes 0..size-1, stored as parent bit masks
/// (at most 32 nodes).
class Dag {
 public:
  static constexpr std::size_t kMaxNodes = 32;

  explicit Dag(std::size_t nodes = 0);

  std::size_t size() const { return parents_.size(); }
  bool has_edge(std::size_t from, std::size_t to) const { return (parents_[to] >> from) & 1U; }
  bool adjacent(std::size_t a, std::size_t b) const { return has_edge(a, b) || has_edge(b, a); }
  std::uint32_t parent_mask(std::size_t node) const { return parents_[node]; }
  std::size_t parent_count(std::size_t node) const;

  /// True when from -> to could be added without closing a directed cycle.
  bool can_add(std::size_t from, std::size_t to) const;
  /// Throws std::invalid_argument on self-loops, duplicates or cycles.
  void add_edge(std::size_t from, std::size_t to);
  void remove_edge(std::size_t from, std::size_t to);

  /// Edges in lexicographic (from, to) order.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  /// Kahn's algorithm, smallest ready index first. Empty when cyclic.
  std::vector<std::size_t> topological_order() const;
  bool is_acyclic() const { return topological_order().size() == size(); }

  bool operator==(const Dag&) const = default;

 private:
  bool reaches(std::size_t from, std::size_t to) const;
  std::vector<std::uint32_t> parents_;
};

/// Partially directed graph. A pair joined in both directions is an
/// undirected edge; in one direction, a directed edge.
class Pdag {
 public:
  explicit Pdag(std::size_t nodes = 0);
  explicit Pdag(const Dag& dag);

  std::size_t size() const { return n_; }
  bool directed(std::size_t a, std::size_t b) const { return mark(a, b) && !mark(b, a); }
  bool undirected(std::size_t a, std::size_t b) const { return mark(a, b) && mark(b, a); }
  bool adjacent(std::size_t a, std::size_t b) const { return mark(a, b) || mark(b, a); }

  void add_directed(std::size_t from, std::size_t to);
  void add_undirected(std::size_t a, std::size_t b);
  void remove(std::size_t a, std::size_t b);
  /// Turns a-b (or b->a) into a->b.
  void orient(std::size_t from, std::size_t to);

  /// Nodes joined to `v` by an undirected edge.
  std::vector<std::size_t> neighbors(std::size_t v) const;
  /// Nodes with a directed edge into `v`.
  std::vector<std::size_t> parents(std::size_t v) const;
  std::vector<std::size_t> adjacents(std::size_t v) const;

  /// Directed edges in (from, to) order; undirected edges as (a, b), a < b.
  std::vector<Edge> directed_edges() const;
  std::vector<Edge> undirected_edges() const;

  bool operator==(const Pdag&) const = default;

 private:
  bool mark(std::size_t a, std::size_t b) const { return m_[a * n_ + b] != 0; }
  std::size_t n_;
  std::vector<char> m_;
};

/// Completed partially directed acyclic graph of a Markov equivalence class.
using Cpdag = Pdag;

/// Applies Meek's rules R1-R4 until nothing changes.
void apply_meek_rules(Pdag& g);

/// Skeleton plus the v-structures of `dag`, closed under Meek's rules.
Cpdag cpdag_of(const Dag& dag);

/// A DAG with the same skeleton and v-structures as `g`, obtained by
/// orienting its undirected edges (Dor and Tarsi). Empty if none exists.
std::optional<Dag> consistent_extension(const Pdag& g);

/// Directed graph that may contain cycles, plus undirected edges; the common
/// currency for reports and voting.
struct MixedGraph {
  std::size_t nodes = 0;
  std::vector<Edge> directed;    // sorted
  std::vector<Edge> undirected;  // sorted, from < to

  static MixedGraph from(const Dag& dag);
  static MixedGraph from(const Pdag& pdag);
  bool operator==(const MixedGraph&) const = default;
};

/// Graphviz rendering: `a -> b;` for directed and `a -> b [dir=none];` for
/// undirected edges, in sorted order.
std::string to_dot(const MixedGraph& g, const std::vector<std::string>& names, const std::string& graph_name);

}  // namespace cardiocausal
