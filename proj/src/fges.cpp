#include <bit>
#include <cmath>
#include <stdexcept>

#include "cardiocausal/structure_search.hpp"
#include "cardiocausal/types.hpp"

namespace cardiocausal {

namespace {

using Mask = std::uint32_t;

Mask mask_of(const std::vector<std::size_t>& nodes) {
  Mask m = 0;
  for (auto v : nodes) m |= 1U << v;
  return m;
}

bool is_clique(const Pdag& g, Mask set) {
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (!((set >> a) & 1U)) continue;
    for (std::size_t b = a + 1; b < g.size(); ++b) {
      if (((set >> b) & 1U) && !g.adjacent(a, b)) return false;
    }
  }
  return true;
}

/// True when some path from `from` to `to` follows only undirected edges or
/// directed edges pointing forward, avoiding the nodes in `blocked`.
bool semi_directed_path(const Pdag& g, std::size_t from, std::size_t to, Mask blocked) {
  Mask seen = 1U << from;
  std::vector<std::size_t> stack{from};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (((seen >> v) & 1U) || !(g.directed(u, v) || g.undirected(u, v))) continue;
      if (v == to) return true;
      if ((blocked >> v) & 1U) continue;
      seen |= 1U << v;
      stack.push_back(v);
    }
  }
  return false;
}

/// Enumerates the subsets of `set` in increasing numeric order.
template <typename F>
void for_each_subset(Mask set, F f) {
  Mask sub = 0;
  while (true) {
    f(sub);
    if (sub == set) break;
    sub = (sub - set) & set;
  }
}

struct Op {
  std::size_t x;
  std::size_t y;
  Mask subset;
  double delta;
};

Cpdag recomplete(const Pdag& g) {
  auto ext = consistent_extension(g);
  if (!ext) throw std::logic_error("operator produced a graph without a consistent extension");
  return cpdag_of(*ext);
}

double tolerance(double score) { return 1e-12 * (1.0 + std::abs(score)); }

}  // namespace

Cpdag fges(const Eigen::MatrixXd& data, const SearchConfig& config) {
  if (config.max_parents == 0) throw InvalidInput("max_parents must be positive");
  BicScorer s(data);
  const auto p = s.variables();
  Cpdag g(p);
  double score = s.score(Dag(p));

  while (true) {
    std::optional<Op> best;
    const double tol = tolerance(score);
    for (std::size_t x = 0; x < p; ++x) {
      for (std::size_t y = 0; y < p; ++y) {
        if (x == y || g.adjacent(x, y)) continue;
        const Mask adj_x = mask_of(g.adjacents(x));
        const Mask nb_y = mask_of(g.neighbors(y));
        const Mask na = nb_y & adj_x;
        const Mask candidates = nb_y & ~adj_x;
        const Mask pa_y = mask_of(g.parents(y));
        for_each_subset(candidates, [&](Mask t) {
          const Mask cond = na | t;
          if (static_cast<std::size_t>(std::popcount(pa_y | cond)) + 1 > config.max_parents) return;
          if (!is_clique(g, cond)) return;
          if (semi_directed_path(g, y, x, cond)) return;
          const double d = s.local(y, pa_y | cond | (1U << x)) - s.local(y, pa_y | cond);
          if (!std::isfinite(d)) return;
          if (!best || d > best->delta + tol) best = Op{x, y, t, d};
        });
      }
    }
    if (!best || best->delta <= tol) break;
    g.add_directed(best->x, best->y);
    for (std::size_t t = 0; t < p; ++t) {
      if ((best->subset >> t) & 1U) g.orient(t, best->y);
    }
    g = recomplete(g);
    score += best->delta;
  }

  while (true) {
    std::optional<Op> best;
    const double tol = tolerance(score);
    for (std::size_t x = 0; x < p; ++x) {
      for (std::size_t y = 0; y < p; ++y) {
        if (x == y || !(g.directed(x, y) || g.undirected(x, y))) continue;
        const Mask na = mask_of(g.neighbors(y)) & mask_of(g.adjacents(x));
        const Mask pa_y = mask_of(g.parents(y)) & ~(1U << x);
        for_each_subset(na, [&](Mask h) {
          const Mask kept = na & ~h;
          if (!is_clique(g, kept)) return;
          const double d = s.local(y, pa_y | kept) - s.local(y, pa_y | kept | (1U << x));
          if (!std::isfinite(d)) return;
          if (!best || d > best->delta + tol) best = Op{x, y, h, d};
        });
      }
    }
    if (!best || best->delta <= tol) break;
    const auto x = best->x;
    const auto y = best->y;
    g.remove(x, y);
    for (std::size_t h = 0; h < p; ++h) {
      if (!((best->subset >> h) & 1U)) continue;
      if (g.undirected(y, h)) g.orient(y, h);
      if (g.undirected(x, h)) g.orient(x, h);
    }
    g = recomplete(g);
    score += best->delta;
  }
  return g;
}

}  // namespace cardiocausal
