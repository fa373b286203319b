#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "cardiocausal/additive_model.hpp"
#include "cardiocausal/structure_search.hpp"
#include "cardiocausal/synthetic.hpp"
#include "sem_support.hpp"

using namespace cardiocausal;
using testsupport::all_dags;

namespace {

Dag dag_of(std::size_t p, std::initializer_list<Edge> edges) {
  Dag g(p);
  for (const auto& e : edges) g.add_edge(e.from, e.to);
  return g;
}

bool is_meek_fixpoint(const Pdag& g) {
  Pdag h = g;
  apply_meek_rules(h);
  return h == g;
}

Dag random_dag(std::size_t p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Dag g(p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      if (u(rng) < 0.5) g.add_edge(order[a], order[b]);
    }
  }
  return g;
}

/// a -> b is covered when pa(b) = pa(a) + {a}; reversing it stays in the class.
std::optional<Edge> covered_edge(const Dag& g, std::mt19937_64& rng) {
  std::vector<Edge> covered;
  for (const auto& e : g.edges()) {
    if (g.parent_mask(e.to) == (g.parent_mask(e.from) | (1U << e.from))) covered.push_back(e);
  }
  if (covered.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, covered.size() - 1);
  return covered[pick(rng)];
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  std::uniform_real_distribution<double> shift(-1000.0, 1000.0);
  Eigen::MatrixXd y = x;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    y.col(j) = (y.col(j) * scale(rng)).array() + shift(rng);
  }
  return y;
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("dag rejects self loops, duplicates and cycles") {
    Dag g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    CHECK_THROWS_AS(g.add_edge(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge(0, 1), std::invalid_argument);
    CHECK_FALSE(g.can_add(2, 0));
    CHECK(g.can_add(0, 2));
    CHECK(g.topological_order() == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("chain has no v-structure and becomes fully undirected") {
    const auto c = cpdag_of(dag_of(3, {{0, 1}, {1, 2}}));
    CHECK(c.directed_edges().empty());
    CHECK(c.undirected_edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  }

  TEST_CASE("collider is kept fully directed") {
    const auto c = cpdag_of(dag_of(3, {{0, 1}, {2, 1}}));
    CHECK(c.directed_edges() == std::vector<Edge>{{0, 1}, {2, 1}});
    CHECK(c.undirected_edges().empty());
  }

  TEST_CASE("collider child's outgoing edge is compelled by R1") {
    // X=0 -> Y=1 <- Z=2, Z -> W=3.
    const auto c = cpdag_of(dag_of(4, {{0, 1}, {2, 1}, {2, 3}}));
    CHECK(c.undirected(2, 3));
    const auto d = cpdag_of(dag_of(4, {{0, 1}, {2, 1}, {1, 3}}));
    CHECK(d.directed(1, 3));
    CHECK(d.directed_edges() == std::vector<Edge>{{0, 1}, {1, 3}, {2, 1}});
  }

  TEST_CASE("equivalence classes over 4 nodes number 185") {
    const auto dags = all_dags(4);
    REQUIRE(dags.size() == 543);
    std::set<std::pair<std::vector<Edge>, std::vector<Edge>>> classes;
    for (const auto& g : dags) {
      const auto c = cpdag_of(g);
      classes.insert({c.directed_edges(), c.undirected_edges()});
    }
    CHECK(classes.size() == 185);
  }

  TEST_CASE("cpdag_of is a Meek fixpoint, idempotent and extendable for every 4-node DAG") {
    for (const auto& g : all_dags(4)) {
      const auto c = cpdag_of(g);
      CHECK(is_meek_fixpoint(c));
      const auto ext = consistent_extension(c);
      REQUIRE(ext.has_value());
      CHECK(ext->is_acyclic());
      CHECK(cpdag_of(*ext) == c);
    }
  }

  TEST_CASE("covered-edge reversal preserves the class") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
      const auto g = random_dag(5, rng);
      const auto e = covered_edge(g, rng);
      if (!e) continue;
      Dag h = g;
      h.remove_edge(e->from, e->to);
      h.add_edge(e->to, e->from);
      CHECK(cpdag_of(h) == cpdag_of(g));
    }
  }

  TEST_CASE("consistent extension fails when orientations cannot be completed") {
    // a - b - c - d - a: a chordless 4-cycle has no extension without a new v-structure.
    Pdag g(4);
    g.add_undirected(0, 1);
    g.add_undirected(1, 2);
    g.add_undirected(2, 3);
    g.add_undirected(3, 0);
    CHECK_FALSE(consistent_extension(g).has_value());
  }

  TEST_CASE("DOT output") {
    MixedGraph g{3, {{0, 1}}, {{1, 2}}};
    const auto dot = to_dot(g, {"HR", "RR", "BR"}, "demo");
    CHECK(dot.find("\"HR\" -> \"RR\";") != std::string::npos);
    CHECK(dot.find("\"RR\" -> \"BR\" [dir=none];") != std::string::npos);
    CHECK_THROWS(to_dot(g, {"HR"}, "demo"));
  }
}

TEST_SUITE("bic") {
  TEST_CASE("independent columns: empty graph beats either single edge") {
    const auto d = testsupport::independent_data(1000, 2, 3);
    const double empty = bic_score(d, Dag(2));
    CHECK(empty > bic_score(d, dag_of(2, {{0, 1}})));
    CHECK(empty > bic_score(d, dag_of(2, {{1, 0}})));
  }

  TEST_CASE("Markov equivalent pair scores agree") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd d(500, 2);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      d(i, 0) = g(rng);
      d(i, 1) = 0.8 * d(i, 0) + g(rng);
    }
    CHECK(bic_score(d, dag_of(2, {{0, 1}})) == doctest::Approx(bic_score(d, dag_of(2, {{1, 0}}))).epsilon(1e-12));
    CHECK(std::abs(bic_score(d, dag_of(2, {{0, 1}})) - bic_score(d, dag_of(2, {{1, 0}}))) < 1e-9);
  }

  TEST_CASE("duplicated parent column gives -infinity") {
    auto d = testsupport::independent_data(200, 3, 4);
    d.col(2) = d.col(1);
    BicScorer s(d);
    CHECK(std::isfinite(s.local(0, 0b010)));
    CHECK(s.local(0, 0b110) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("local score matches the Gaussian likelihood of an OLS fit") {
    std::mt19937_64 rng(9);
    const auto sem = testsupport::random_sem(4, 0.6, 0.5, 1.5, rng);
    const auto d = testsupport::sample(sem, 300, rng);
    BicScorer s(d);
    // Child 3 on parents {0, 2}: oracle via normal equations on centred data.
    Eigen::MatrixXd x(d.rows(), 3);
    x.col(0).setOnes();
    x.col(1) = d.col(0);
    x.col(2) = d.col(2);
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(d.col(3));
    const double n = static_cast<double>(d.rows());
    const double sigma2 = (d.col(3) - x * beta).squaredNorm() / n;
    const double expected = -0.5 * n * (std::log(2.0 * M_PI * sigma2) + 1.0) - 0.5 * 4.0 * std::log(n);
    CHECK(s.local(3, 0b0101) == doctest::Approx(expected).epsilon(1e-10));
  }

  TEST_CASE("decomposability: single-edge edits update one term") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
      const auto sem = testsupport::random_sem(5, 0.4, 0.3, 1.0, rng);
      const auto d = testsupport::sample(sem, 200, rng);
      BicScorer s(d);
      Dag g = random_dag(5, rng);
      const double before = s.score(g);
      for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = 0; b < 5; ++b) {
          Dag h = g;
          double delta;
          if (g.has_edge(a, b)) {
            h.remove_edge(a, b);
            delta = s.local(b, h.parent_mask(b)) - s.local(b, g.parent_mask(b));
          } else if (g.can_add(a, b)) {
            h.add_edge(a, b);
            delta = s.local(b, h.parent_mask(b)) - s.local(b, g.parent_mask(b));
          } else {
            continue;
          }
          CHECK(std::abs(BicScorer(d).score(h) - (before + delta)) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("equivalence invariance over random DAGs and covered-edge reversals") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 100; ++t) {
      const std::size_t p = 3 + static_cast<std::size_t>(t % 3);
      const auto sem = testsupport::random_sem(p, 0.5, 0.3, 1.2, rng);
      const auto d = testsupport::sample(sem, 500, rng);
      BicScorer s(d);
      Dag g = random_dag(p, rng);
      const double base = s.score(g);
      for (int step = 0; step < 5; ++step) {
        const auto e = covered_edge(g, rng);
        if (!e) break;
        g.remove_edge(e->from, e->to);
        g.add_edge(e->to, e->from);
        CHECK(std::abs(s.score(g) - base) < 1e-6);
      }
    }
  }

  TEST_CASE("location shifts leave the score unchanged") {
    const auto d = testsupport::chain_data(400, 2);
    const Eigen::MatrixXd shifted = (d.rowwise() + Eigen::RowVector3d(5.0, -100.0, 1e3)).eval();
    const auto g = dag_of(3, {{0, 1}, {1, 2}});
    CHECK(bic_score(shifted, g) == doctest::Approx(bic_score(d, g)).epsilon(1e-9));
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(BicScorer(Eigen::MatrixXd::Zero(3, 3)), InvalidInput);
    Eigen::MatrixXd c = testsupport::independent_data(50, 2, 1);
    c.col(1).setConstant(2.0);
    CHECK_THROWS_AS(BicScorer{c}, InvalidInput);
    CHECK_THROWS_AS(bic_score(testsupport::independent_data(50, 2, 1), Dag(3)), InvalidInput);
  }
}

TEST_SUITE("enumeration") {
  TEST_CASE("DAG counts") {
    CHECK(enumerate_best_dag(testsupport::independent_data(50, 2, 1)).dags_enumerated == 3);
    CHECK(enumerate_best_dag(testsupport::independent_data(50, 3, 1)).dags_enumerated == 25);
    CHECK(enumerate_best_dag(testsupport::independent_data(50, 4, 1)).dags_enumerated == 543);
    CHECK(enumerate_best_dag(testsupport::independent_data(50, 5, 1)).dags_enumerated == 29281);
    CHECK_THROWS_AS(enumerate_best_dag(testsupport::independent_data(50, 6, 1)), InvalidInput);
    CHECK_THROWS_AS(enumerate_best_dag(testsupport::independent_data(50, 4, 1), 3), InvalidInput);
  }

  TEST_CASE("argmax agrees with an independent scan of every DAG") {
    std::mt19937_64 rng(8);
    const auto dags = all_dags(4);
    for (int t = 0; t < 10; ++t) {
      const auto sem = testsupport::random_sem(4, 0.5, 0.3, 1.0, rng);
      const auto d = testsupport::sample(sem, 300, rng);
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& g : dags) best = std::max(best, bic_score(d, g));
      const auto r = enumerate_best_dag(d);
      CHECK(r.best_score == doctest::Approx(best).epsilon(1e-12));
      CHECK(bic_score(d, r.best) == doctest::Approx(r.best_score).epsilon(1e-12));
      CHECK(r.best_cpdag == cpdag_of(r.best));
    }
  }

  TEST_CASE("tie-break picks the lexicographically smallest edge list") {
    // X -> Y and Y -> X score equally; [(0, 1)] < [(1, 0)].
    const auto d = testsupport::chain_data(1000, 4).leftCols(2).eval();
    CHECK(enumerate_best_dag(d).best.edges() == std::vector<Edge>{{0, 1}});
  }

  TEST_CASE("collider class is the directed collider") {
    const auto r = enumerate_best_dag(testsupport::collider_data(5000, 1));
    CHECK(r.best.edges() == std::vector<Edge>{{0, 1}, {2, 1}});
    CHECK(r.best_cpdag.directed_edges() == std::vector<Edge>{{0, 1}, {2, 1}});
    CHECK(r.best_cpdag.undirected_edges().empty());
  }
}

TEST_SUITE("hill climbing and tabu") {
  TEST_CASE("collider: tabu recovers it; hill climbing depends on column order") {
    const auto d = testsupport::collider_data(5000, 1);
    const auto expected = std::vector<Edge>{{0, 1}, {2, 1}};
    CHECK(tabu_search(d, {}).edges() == expected);

    // Columns X, Y, Z: the first move ties Y -> Z with Z -> Y exactly, the
    // lexicographic rule takes Y -> Z, and the climb ends in the complete
    // graph, a strict local optimum below the collider.
    const auto trapped = hill_climb(d, {});
    CHECK(trapped.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(bic_score(d, trapped) < enumerate_best_dag(d).best_score - 1.0);

    // Columns X, Z, Y: the same tie now resolves to Z -> Y.
    Eigen::MatrixXd reordered(d.rows(), 3);
    reordered << d.col(0), d.col(2), d.col(1);
    CHECK(hill_climb(reordered, {}).edges() == std::vector<Edge>{{0, 2}, {1, 2}});
  }

  TEST_CASE("independent columns give the empty graph") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto d = testsupport::independent_data(1000, 4, seed);
      CHECK(hill_climb(d, {}).edge_count() == 0);
      CHECK(tabu_search(d, {}).edge_count() == 0);
    }
  }

  TEST_CASE("chain: hill climbing reaches the oracle score") {
    const auto d = testsupport::chain_data(2000, 3);
    const auto oracle = enumerate_best_dag(d);
    CHECK(std::abs(bic_score(d, hill_climb(d, {})) - oracle.best_score) < 1e-9);
    CHECK(cpdag_of(hill_climb(d, {})) == oracle.best_cpdag);
  }

  TEST_CASE("tabu never scores below hill climbing") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 40; ++t) {
      const auto sem = testsupport::random_sem(5, 0.5, 0.3, 1.5, rng);
      const auto d = testsupport::sample(sem, 300, rng);
      CHECK(bic_score(d, tabu_search(d, {})) >= bic_score(d, hill_climb(d, {})));
    }
  }

  TEST_CASE("tabu escapes an adversarial start that traps hill climbing") {
    std::mt19937_64 rng(4);
    const auto sem = testsupport::random_sem(4, 0.5, 0.5, 2.0, rng);
    const auto d = testsupport::sample(sem, 2000, rng);
    const auto oracle = enumerate_best_dag(d);
    const auto start = dag_of(4, {{1, 0}});
    const double hc = bic_score(d, hill_climb(d, {}, start));
    const double tabu = bic_score(d, tabu_search(d, {}, start));
    CHECK(hc < oracle.best_score - 1.0);
    CHECK(std::abs(tabu - oracle.best_score) < 1e-6);
  }

  TEST_CASE("max_parents is respected and output is acyclic") {
    std::mt19937_64 rng(2);
    const auto sem = testsupport::random_sem(6, 0.9, 0.5, 1.0, rng);
    const auto d = testsupport::sample(sem, 1000, rng);
    SearchConfig c;
    c.max_parents = 2;
    for (const auto& g : {hill_climb(d, c), tabu_search(d, c)}) {
      CHECK(g.is_acyclic());
      for (std::size_t v = 0; v < 6; ++v) CHECK(g.parent_count(v) <= 2);
    }
  }

  TEST_CASE("random restarts never lower the score") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
      const auto sem = testsupport::random_sem(5, 0.6, 0.5, 2.0, rng);
      const auto d = testsupport::sample(sem, 500, rng);
      SearchConfig c;
      c.random_restarts = 5;
      c.seed = 99;
      CHECK(bic_score(d, hill_climb(d, c)) >= bic_score(d, hill_climb(d, {})) - 1e-9);
      CHECK(hill_climb(d, c) == hill_climb(d, c));
    }
  }
}

TEST_SUITE("fges") {
  TEST_CASE("chain gives an undirected chain") {
    const auto c = fges(testsupport::chain_data(5000, 1), {});
    CHECK(c.directed_edges().empty());
    CHECK(c.undirected_edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  }

  TEST_CASE("collider gives the directed collider") {
    const auto c = fges(testsupport::collider_data(5000, 1), {});
    CHECK(c.directed_edges() == std::vector<Edge>{{0, 1}, {2, 1}});
    CHECK(c.undirected_edges().empty());
  }

  TEST_CASE("independent columns give an empty class") {
    const auto c = fges(testsupport::independent_data(1000, 4, 7), {});
    CHECK(c.directed_edges().empty());
    CHECK(c.undirected_edges().empty());
  }

  TEST_CASE("result is a Meek fixpoint and no single-edge neighbour of any member scores higher") {
    std::mt19937_64 rng(1);
    const auto dags = all_dags(4);
    for (int t = 0; t < 20; ++t) {
      const auto sem = testsupport::random_sem(4, 0.5, 0.3, 1.0, rng);
      const auto d = testsupport::sample(sem, 2000, rng);
      BicScorer s(d);
      const auto c = fges(d, {});
      CHECK(is_meek_fixpoint(c));
      const auto ext = consistent_extension(c);
      REQUIRE(ext.has_value());
      REQUIRE(cpdag_of(*ext) == c);
      const double score = s.score(*ext);
      bool improvable = false;
      for (const auto& g : dags) {
        if (!(cpdag_of(g) == c)) continue;
        for (std::size_t a = 0; a < 4; ++a) {
          for (std::size_t b = 0; b < 4; ++b) {
            Dag h = g;
            if (g.has_edge(a, b)) {
              h.remove_edge(a, b);
            } else if (g.can_add(a, b)) {
              h.add_edge(a, b);
            } else {
              continue;
            }
            if (s.score(h) > score + 1e-7) improvable = true;
          }
        }
      }
      CHECK_FALSE(improvable);
    }
  }
}

TEST_SUITE("search invariants") {
  TEST_CASE("affine rescaling leaves hill climbing, tabu and fges unchanged") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 15; ++t) {
      const auto sem = testsupport::random_sem(5, 0.5, 0.5, 1.5, rng);
      const auto d = testsupport::sample(sem, 400, rng);
      const auto e = affine(d, 1000 + static_cast<std::uint64_t>(t));
      CHECK(hill_climb(d, {}) == hill_climb(e, {}));
      CHECK(tabu_search(d, {}) == tabu_search(e, {}));
      CHECK(fges(d, {}) == fges(e, {}));
    }
  }

  TEST_CASE("determinism of serialized output") {
    const auto d = testsupport::sample(testsupport::random_sem(5, 0.5, 0.5, 1.5, *std::make_unique<std::mt19937_64>(3)),
                                       300, *std::make_unique<std::mt19937_64>(4));
    const std::vector<std::string> names{"a", "b", "c", "d", "e"};
    CHECK(to_dot(MixedGraph::from(tabu_search(d, {})), names, "t") ==
          to_dot(MixedGraph::from(tabu_search(d, {})), names, "t"));
    CHECK(to_dot(MixedGraph::from(fges(d, {})), names, "f") == to_dot(MixedGraph::from(fges(d, {})), names, "f"));
    CHECK(to_dot(MixedGraph::from(cam_learn(d, {})), names, "c") ==
          to_dot(MixedGraph::from(cam_learn(d, {})), names, "c"));
  }
}

TEST_SUITE("additive model") {
  TEST_CASE("spline basis rows sum to a constant before centring; penalty annihilates linear functions") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd x(300);
    for (auto& v : x) v = g(rng);
    const auto term = gam::cubic_spline_term(x);
    CHECK(term.design.cols() == 9);
    // Sum-to-zero constraint: every column of the design sums to zero.
    CHECK(term.design.colwise().sum().cwiseAbs().maxCoeff() < 1e-9);
    // The centred linear function lies in the span with zero penalty.
    Eigen::VectorXd lin = x.array() - x.mean();
    const Eigen::VectorXd coef = term.design.colPivHouseholderQr().solve(lin);
    CHECK((term.design * coef - lin).norm() < 1e-8 * lin.norm());
    CHECK(coef.dot(term.penalty * coef) < 1e-8 * term.penalty.norm() * coef.squaredNorm());
  }

  TEST_CASE("smoother recovers a sine") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd x(500);
    Eigen::VectorXd y(500);
    Eigen::VectorXd truth(500);
    for (Eigen::Index i = 0; i < 500; ++i) {
      x(i) = g(rng);
      truth(i) = std::sin(2.0 * x(i));
      y(i) = truth(i) + 0.2 * g(rng);
    }
    const auto term = gam::cubic_spline_term(x);
    const auto fit = gam::fit_additive(y, {&term});
    const double mse = (fit.fitted - truth).squaredNorm() / 500.0;
    CHECK(mse < 0.01);
    CHECK(fit.edf > 3.0);
    CHECK(fit.edf < 11.0);
  }

  TEST_CASE("term p-values are roughly uniform under the null") {
    int below_05 = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      const auto d = testsupport::independent_data(200, 2, 500 + static_cast<std::uint64_t>(t));
      const auto term = gam::cubic_spline_term(d.col(0));
      const Eigen::VectorXd y = d.col(1);
      const auto fit = gam::fit_additive(y, {&term});
      below_05 += gam::term_p_values(y, {&term}, fit)[0] < 0.05;
    }
    CHECK(below_05 <= 20);  // 5% nominal, binomial upper tail about 1e-3
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(gam::cubic_spline_term(Eigen::VectorXd::Constant(50, 1.0)), InvalidInput);
    const auto d = testsupport::independent_data(60, 2, 1);
    const auto term = gam::cubic_spline_term(d.col(0));
    CHECK_THROWS_AS(gam::fit_additive(Eigen::VectorXd::Zero(10), {&term}), InvalidInput);
  }
}

TEST_SUITE("cam") {
  TEST_CASE("sine benchmark recovers X -> Y") {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> g(0.0, 1.0);
      Eigen::MatrixXd d(500, 2);
      for (Eigen::Index i = 0; i < 500; ++i) {
        d(i, 0) = g(rng);
        d(i, 1) = std::sin(2.0 * d(i, 0)) + 0.2 * g(rng);
      }
      hits += cam_learn(d, {}).edges() == std::vector<Edge>{{0, 1}};
    }
    CHECK(hits >= 18);
  }

  TEST_CASE("independent columns are pruned to the empty graph") {
    int empty = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      empty += cam_learn(testsupport::independent_data(500, 2, seed), {}).edge_count() == 0;
    }
    CHECK(empty >= 18);
  }

  TEST_CASE("linear pair keeps exactly one edge") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd d(500, 2);
    for (Eigen::Index i = 0; i < 500; ++i) {
      d(i, 0) = g(rng);
      d(i, 1) = 2.0 * d(i, 0) + g(rng);
    }
    CHECK(cam_learn(d, {}).edge_count() == 1);
  }

  TEST_CASE("result is acyclic and scale-free") {
    std::mt19937_64 rng(12);
    const auto sem = testsupport::random_sem(5, 0.5, 0.5, 1.5, rng);
    const auto d = testsupport::sample(sem, 200, rng);
    const auto g = cam_learn(d, {});
    CHECK(g.is_acyclic());
    CHECK(cam_learn(affine(d, 5), {}).edges() == g.edges());
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(cam_learn(testsupport::independent_data(49, 2, 1), {}), InvalidInput);
    CHECK_THROWS_AS(cam_learn(testsupport::independent_data(60, 21, 1), {}), InvalidInput);
    auto d = testsupport::independent_data(60, 2, 1);
    d.col(0).setConstant(1.0);
    CHECK_THROWS_AS(cam_learn(d, {}), InvalidInput);
  }
}

TEST_SUITE("gc graph") {
  TEST_CASE("independent columns: false-positive rate per pair at most 0.1") {
    std::size_t edges = 0;
    std::size_t pairs = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto d = testsupport::independent_data(100, 5, seed);
      const auto r = gc_graph(d, {"a", "b", "c", "d", "e"});
      edges += r.graph.directed.size();
      pairs += 10;
      CHECK(r.warnings.empty());
    }
    CHECK(static_cast<double>(edges) / static_cast<double>(pairs) <= 0.1);
  }

  TEST_CASE("embedded quadratic pair is oriented, identical columns are not") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd d(500, 4);
    for (Eigen::Index i = 0; i < 500; ++i) {
      d(i, 0) = g(rng);
      d(i, 1) = d(i, 0) * d(i, 0);
      d(i, 2) = g(rng);
      d(i, 3) = d(i, 2);
    }
    const auto r = gc_graph(d, {"x", "y", "u", "v"});
    const auto& e = r.graph.directed;
    CHECK(std::find(e.begin(), e.end(), Edge{0, 1}) != e.end());
    CHECK(std::find(e.begin(), e.end(), Edge{2, 3}) == e.end());
    CHECK(std::find(e.begin(), e.end(), Edge{3, 2}) == e.end());
  }

  TEST_CASE("too few rows: every pair skipped with a warning") {
    const auto r = gc_graph(testsupport::independent_data(10, 3, 1), {"a", "b", "c"});
    CHECK(r.graph.directed.empty());
    CHECK(r.warnings.size() == 3);
  }

  TEST_CASE("parameter table overload covers the ten parameters") {
    const auto table = synthetic::make_cohort(100, 5);
    const auto r = gc_graph(table, Position::Supine);
    CHECK(r.graph.nodes == kParameterCount);
    for (const auto& e : r.graph.directed) CHECK(e.from != e.to);
  }
}
