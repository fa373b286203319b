#include <cmath>
#include <limits>

#include "cardiocausal/additive_model.hpp"
#include "cardiocausal/structure_search.hpp"
#include "cardiocausal/types.hpp"

namespace cardiocausal {

namespace {

constexpr std::size_t kMinRows = 50;
constexpr std::size_t kMaxColumns = 20;

double log_residual_variance(const Eigen::VectorXd& y, const std::vector<gam::SmoothTerm>& terms,
                             std::uint32_t parents) {
  const double n = static_cast<double>(y.size());
  if (parents == 0U) return std::log(y.squaredNorm() / n);
  std::vector<const gam::SmoothTerm*> used;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if ((parents >> j) & 1U) used.push_back(&terms[j]);
  }
  const auto fit = gam::fit_additive(y, used);
  return std::log(std::max(fit.rss / n, 1e-300));
}

}  // namespace

Dag cam_learn(const Eigen::MatrixXd& data, const SearchConfig& config) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto p = static_cast<std::size_t>(data.cols());
  if (n < kMinRows) throw InvalidInput("CAM needs at least 50 rows");
  if (p == 0 || p > kMaxColumns) throw InvalidInput("CAM supports 1 to 20 columns");
  if (!data.allFinite()) throw InvalidInput("data matrix contains non-finite values");
  if (config.max_parents == 0) throw InvalidInput("max_parents must be positive");

  Eigen::MatrixXd z = data.rowwise() - data.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n));
    if (!(sd > 0.0)) throw InvalidInput("CAM smoother failed: constant column");
    z.col(j) /= sd;
  }
  std::vector<gam::SmoothTerm> terms;
  for (Eigen::Index j = 0; j < z.cols(); ++j) terms.push_back(gam::cubic_spline_term(z.col(j)));

  // Stage 1: greedy edge insertion by gain in log residual variance.
  Dag order_graph(p);
  std::vector<double> current(p);
  for (std::size_t j = 0; j < p; ++j) current[j] = log_residual_variance(z.col(j), terms, 0U);
  std::vector<std::vector<double>> gain(p, std::vector<double>(p, 0.0));
  auto refresh = [&](std::size_t j) {
    for (std::size_t i = 0; i < p; ++i) {
      gain[i][j] = -std::numeric_limits<double>::infinity();
      if (i == j || order_graph.has_edge(i, j)) continue;
      gain[i][j] = current[j] - log_residual_variance(z.col(j), terms, order_graph.parent_mask(j) | (1U << i));
    }
  };
  for (std::size_t j = 0; j < p; ++j) refresh(j);
  while (true) {
    double best = 0.0;
    std::optional<Edge> pick;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        if (i == j || !order_graph.can_add(i, j) || order_graph.parent_count(j) >= config.max_parents) continue;
        if (gain[i][j] > best) {
          best = gain[i][j];
          pick = Edge{i, j};
        }
      }
    }
    if (!pick) break;
    order_graph.add_edge(pick->from, pick->to);
    current[pick->to] -= best;
    refresh(pick->to);
  }
  const auto order = order_graph.topological_order();

  // Stage 2: prune each node's order-preceding candidates.
  Dag out(p);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto child = order[k];
    std::vector<const gam::SmoothTerm*> used;
    for (std::size_t i = 0; i < k; ++i) used.push_back(&terms[order[i]]);
    const Eigen::VectorXd y = z.col(static_cast<Eigen::Index>(child));
    const auto fit = gam::fit_additive(y, used);
    const auto pv = gam::term_p_values(y, used, fit);
    for (std::size_t i = 0; i < k; ++i) {
      if (pv[i] < config.cam_prune_alpha) out.add_edge(order[i], child);
    }
  }
  return out;
}

}  // namespace cardiocausal
