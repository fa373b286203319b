#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cardiocausal/graph.hpp"
#include "cardiocausal/record_io.hpp"

namespace cardiocausal {

enum class ScoreKind { GaussianBic };

struct SearchConfig {
  ScoreKind score = ScoreKind::GaussianBic;
  std::size_t max_parents = 4;
  std::size_t tabu_length = 10;
  std::size_t tabu_max_stalls = 15;
  std::size_t random_restarts = 0;
  double cam_prune_alpha = 0.001;
  std::uint64_t seed = 0;
};

/// Gaussian BIC over the columns of an n x p data matrix. Local scores are
/// memoized per (node, parent set).
class BicScorer {
 public:
  explicit BicScorer(const Eigen::MatrixXd& data);

  std::size_t samples() const { return n_; }
  std::size_t variables() const { return p_; }

  /// Log-likelihood of `node` given the parents in `parent_mask` at the
  /// least-squares fit, minus (|parents| + 2)/2 * ln n. Collinear parents
  /// give -infinity.
  double local(std::size_t node, std::uint32_t parent_mask) const;
  double score(const Dag& dag) const;

 private:
  double compute(std::size_t node, std::uint32_t parent_mask) const;

  std::size_t n_;
  std::size_t p_;
  Eigen::MatrixXd cov_;
  mutable std::unordered_map<std::uint64_t, double> cache_;
};

double bic_score(const Eigen::MatrixXd& data, const Dag& dag);

/// Greedy best-improvement search over edge additions, deletions and
/// reversals, starting from `initial` (empty graph when absent). Ties are
/// broken by (operator, from, to) with add < delete < reverse.
Dag hill_climb(const Eigen::MatrixXd& data, const SearchConfig& config, const std::optional<Dag>& initial = {});

/// Hill climbing followed by tabu moves: the best move that does not undo
/// one of the last `tabu_length` moves is taken even if it lowers the score.
/// A tabu move is still allowed when it reaches a new best score. Stops after
/// `tabu_max_stalls` moves without a new best.
Dag tabu_search(const Eigen::MatrixXd& data, const SearchConfig& config, const std::optional<Dag>& initial = {});

/// Greedy equivalence search: forward Insert phase, then backward Delete
/// phase, each operator scored on the equivalence class and followed by
/// re-completion of the class. Parent sets are capped at `max_parents`.
Cpdag fges(const Eigen::MatrixXd& data, const SearchConfig& config);

struct EnumerationResult {
  Dag best;
  double best_score;
  Cpdag best_cpdag;
  std::size_t dags_enumerated;
};

/// Scores every DAG over at most 5 columns. Score ties (relative 1e-12) go to
/// the lexicographically smallest edge list.
EnumerationResult enumerate_best_dag(const Eigen::MatrixXd& data, std::size_t max_nodes = 5);

/// Causal additive model: greedy order search by additive-regression
/// log-likelihood gain, then significance pruning of each node's
/// order-preceding candidates. Columns are standardized internally.
Dag cam_learn(const Eigen::MatrixXd& data, const SearchConfig& config);

struct GcGraph {
  MixedGraph graph;  // directed edges only, cycles allowed
  std::vector<std::string> warnings;
};

/// One directed edge per column pair whose generalized-correlation direction
/// is decided. A pair that cannot be evaluated is skipped with a warning.
GcGraph gc_graph(const Eigen::MatrixXd& data, const std::vector<std::string>& names);

/// The same over the ten parameter columns of one position.
GcGraph gc_graph(const ParameterTable& table, Position position);

}  // namespace cardiocausal
