#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "cardiocausal/structure_search.hpp"
#include "cardiocausal/types.hpp"

namespace cardiocausal {

namespace {

constexpr double kRelativeTolerance = 1e-12;

enum class OpKind { Add = 0, Delete = 1, Reverse = 2 };

struct Move {
  OpKind kind;
  std::size_t from;
  std::size_t to;
  double delta;
};

double tolerance(double score) { return kRelativeTolerance * (1.0 + std::abs(score)); }

bool undoes(const Move& m, const Move& earlier) {
  switch (earlier.kind) {
    case OpKind::Add:
      return m.kind == OpKind::Delete && m.from == earlier.from && m.to == earlier.to;
    case OpKind::Delete:
      return m.kind == OpKind::Add && m.from == earlier.from && m.to == earlier.to;
    case OpKind::Reverse:
      return m.kind == OpKind::Reverse && m.from == earlier.to && m.to == earlier.from;
  }
  return false;
}

bool valid(const Dag& g, OpKind kind, std::size_t a, std::size_t b, std::size_t max_parents) {
  switch (kind) {
    case OpKind::Add:
      return g.can_add(a, b) && g.parent_count(b) < max_parents;
    case OpKind::Delete:
      return g.has_edge(a, b);
    case OpKind::Reverse: {
      if (!g.has_edge(a, b) || g.parent_count(a) >= max_parents) return false;
      Dag h = g;
      h.remove_edge(a, b);
      return h.can_add(b, a);
    }
  }
  return false;
}

double delta_of(const BicScorer& s, const Dag& g, OpKind kind, std::size_t a, std::size_t b) {
  const auto pb = g.parent_mask(b);
  const auto bit_a = 1U << a;
  switch (kind) {
    case OpKind::Add:
      return s.local(b, pb | bit_a) - s.local(b, pb);
    case OpKind::Delete:
      return s.local(b, pb & ~bit_a) - s.local(b, pb);
    case OpKind::Reverse: {
      const auto pa = g.parent_mask(a);
      return s.local(b, pb & ~bit_a) - s.local(b, pb) + s.local(a, pa | (1U << b)) - s.local(a, pa);
    }
  }
  return 0.0;
}

void apply(Dag& g, const Move& m) {
  switch (m.kind) {
    case OpKind::Add:
      g.add_edge(m.from, m.to);
      break;
    case OpKind::Delete:
      g.remove_edge(m.from, m.to);
      break;
    case OpKind::Reverse:
      g.remove_edge(m.from, m.to);
      g.add_edge(m.to, m.from);
      break;
  }
}

/// Best valid move in (kind, from, to) order accepted by `allowed`; a later
/// candidate wins only when strictly better beyond the tolerance.
template <typename Allowed>
std::optional<Move> best_move(const BicScorer& s, const Dag& g, std::size_t max_parents, double score,
                              Allowed allowed) {
  std::optional<Move> best;
  const double tol = tolerance(score);
  for (auto kind : {OpKind::Add, OpKind::Delete, OpKind::Reverse}) {
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = 0; b < g.size(); ++b) {
        if (a == b || !valid(g, kind, a, b, max_parents)) continue;
        const double d = delta_of(s, g, kind, a, b);
        if (!std::isfinite(d)) continue;
        Move m{kind, a, b, d};
        if (!allowed(m)) continue;
        if (!best || d > best->delta + tol) best = m;
      }
    }
  }
  return best;
}

Dag climb(const BicScorer& s, Dag g, std::size_t max_parents) {
  double score = s.score(g);
  while (true) {
    auto m = best_move(s, g, max_parents, score, [](const Move&) { return true; });
    if (!m || m->delta <= tolerance(score)) break;
    apply(g, *m);
    score += m->delta;
  }
  return g;
}

Dag start_graph(const BicScorer& s, const SearchConfig& config, const std::optional<Dag>& initial) {
  if (config.max_parents == 0) throw InvalidInput("max_parents must be positive");
  if (!initial) return Dag(s.variables());
  if (initial->size() != s.variables()) throw InvalidInput("initial graph size does not match data columns");
  return *initial;
}

Dag perturb(const Dag& g, std::size_t max_parents, std::mt19937_64& rng) {
  Dag h = g;
  const auto p = g.size();
  std::uniform_int_distribution<std::size_t> node(0, p - 1);
  std::uniform_int_distribution<int> op(0, 2);
  for (std::size_t step = 0; step < p; ++step) {
    const auto a = node(rng);
    const auto b = node(rng);
    const auto kind = static_cast<OpKind>(op(rng));
    if (a != b && valid(h, kind, a, b, max_parents)) apply(h, {kind, a, b, 0.0});
  }
  return h;
}

Dag hill_climb_scored(const BicScorer& s, const SearchConfig& config, const std::optional<Dag>& initial) {
  Dag best = climb(s, start_graph(s, config, initial), config.max_parents);
  double best_score = s.score(best);
  std::mt19937_64 rng(config.seed);
  for (std::size_t r = 0; r < config.random_restarts; ++r) {
    Dag g = climb(s, perturb(best, config.max_parents, rng), config.max_parents);
    const double sc = s.score(g);
    if (sc > best_score + tolerance(best_score)) {
      best = g;
      best_score = sc;
    }
  }
  return best;
}

}  // namespace

Dag hill_climb(const Eigen::MatrixXd& data, const SearchConfig& config, const std::optional<Dag>& initial) {
  BicScorer s(data);
  return hill_climb_scored(s, config, initial);
}

Dag tabu_search(const Eigen::MatrixXd& data, const SearchConfig& config, const std::optional<Dag>& initial) {
  BicScorer s(data);
  Dag current = hill_climb_scored(s, config, initial);
  Dag best = current;
  double score = s.score(current);
  double best_score = score;
  std::deque<Move> tabu;
  std::size_t stalls = 0;
  while (stalls < config.tabu_max_stalls) {
    auto is_tabu = [&](const Move& m) {
      return std::any_of(tabu.begin(), tabu.end(), [&](const Move& t) { return undoes(m, t); });
    };
    auto m = best_move(s, current, config.max_parents, score, [&](const Move& mv) {
      return !is_tabu(mv) || score + mv.delta > best_score + tolerance(best_score);
    });
    if (!m) break;
    apply(current, *m);
    score += m->delta;
    tabu.push_back(*m);
    while (tabu.size() > config.tabu_length) tabu.pop_front();
    if (score > best_score + tolerance(best_score)) {
      best = current;
      best_score = score;
      stalls = 0;
    } else {
      ++stalls;
    }
  }
  return best;
}

EnumerationResult enumerate_best_dag(const Eigen::MatrixXd& data, std::size_t max_nodes) {
  BicScorer s(data);
  const auto p = s.variables();
  if (max_nodes > 5) throw InvalidInput("enumeration is limited to 5 nodes");
  if (p > max_nodes) throw InvalidInput("too many variables for exhaustive enumeration");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) pairs.emplace_back(a, b);
  }
  std::size_t combos = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) combos *= 3;

  std::optional<Dag> best;
  std::vector<Edge> best_edges;
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  std::vector<std::uint32_t> parents(p);
  for (std::size_t code = 0; code < combos; ++code) {
    std::fill(parents.begin(), parents.end(), 0U);
    std::size_t c = code;
    for (const auto& [a, b] : pairs) {
      const auto state = c % 3;
      c /= 3;
      if (state == 1) parents[b] |= 1U << a;
      if (state == 2) parents[a] |= 1U << b;
    }
    std::uint32_t placed = 0;
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (std::size_t v = 0; v < p; ++v) {
        if (!((placed >> v) & 1U) && (parents[v] & ~placed) == 0U) {
          placed |= 1U << v;
          progressed = true;
        }
      }
    }
    if (placed != (1U << p) - 1U) continue;
    ++count;
    double sc = 0.0;
    for (std::size_t v = 0; v < p; ++v) sc += s.local(v, parents[v]);
    if (!std::isfinite(sc)) continue;
    Dag g(p);
    for (std::size_t v = 0; v < p; ++v) {
      for (std::size_t u = 0; u < p; ++u) {
        if ((parents[v] >> u) & 1U) g.add_edge(u, v);
      }
    }
    auto edges = g.edges();
    const double tol = tolerance(best_score);
    const bool better = !best || sc > best_score + tol ||
                        (std::abs(sc - best_score) <= tol && edges < best_edges);
    if (better) {
      best = g;
      best_edges = std::move(edges);
      best_score = sc;
    }
  }
  if (!best) throw InvalidInput("every DAG has an infinite score");
  return {*best, best_score, cpdag_of(*best), count};
}

}  // namespace cardiocausal
