#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "cardiocausal/structure_search.hpp"
#include "cardiocausal/types.hpp"

namespace cardiocausal {

namespace {
constexpr double kPivotTolerance = 1e-10;
constexpr double kResidualFloor = 1e-12;
}  // namespace

BicScorer::BicScorer(const Eigen::MatrixXd& data)
    : n_(static_cast<std::size_t>(data.rows())), p_(static_cast<std::size_t>(data.cols())) {
  if (p_ == 0) throw InvalidInput("data matrix has no columns");
  if (p_ > Dag::kMaxNodes) throw InvalidInput("at most 32 variables are supported");
  if (n_ <= p_) throw InvalidInput("BIC scoring needs more rows than columns");
  if (!data.allFinite()) throw InvalidInput("data matrix contains non-finite values");
  const Eigen::MatrixXd centred = data.rowwise() - data.colwise().mean();
  cov_ = centred.transpose() * centred / static_cast<double>(n_);
  for (std::size_t j = 0; j < p_; ++j) {
    if (!(cov_(j, j) > 0.0)) throw InvalidInput("constant column in data matrix");
  }
}

double BicScorer::local(std::size_t node, std::uint32_t parent_mask) const {
  const std::uint64_t key = (static_cast<std::uint64_t>(parent_mask) << 6) | node;
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double s = compute(node, parent_mask);
  cache_.emplace(key, s);
  return s;
}

double BicScorer::compute(std::size_t node, std::uint32_t parent_mask) const {
  std::vector<Eigen::Index> pa;
  for (std::size_t j = 0; j < p_; ++j) {
    if ((parent_mask >> j) & 1U) pa.push_back(static_cast<Eigen::Index>(j));
  }
  const auto v = static_cast<Eigen::Index>(node);
  double resid = cov_(v, v);
  if (!pa.empty()) {
    const auto k = static_cast<Eigen::Index>(pa.size());
    Eigen::MatrixXd s(k, k);
    Eigen::VectorXd b(k);
    Eigen::VectorXd scale(k);
    for (Eigen::Index i = 0; i < k; ++i) scale(i) = 1.0 / std::sqrt(cov_(pa[i], pa[i]));
    for (Eigen::Index i = 0; i < k; ++i) {
      b(i) = cov_(pa[i], v) * scale(i);
      for (Eigen::Index j = 0; j < k; ++j) s(i, j) = cov_(pa[i], pa[j]) * scale(i) * scale(j);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd l = llt.matrixL();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (l(i, i) * l(i, i) < kPivotTolerance) return -std::numeric_limits<double>::infinity();
    }
    const Eigen::VectorXd w = llt.matrixL().solve(b);
    resid -= w.squaredNorm();
  }
  resid = std::max(resid, kResidualFloor * cov_(v, v));
  const double n = static_cast<double>(n_);
  const double params = static_cast<double>(pa.size() + 2);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * resid) + 1.0) - 0.5 * params * std::log(n);
}

double BicScorer::score(const Dag& dag) const {
  if (dag.size() != p_) throw InvalidInput("graph size does not match data columns");
  double s = 0.0;
  for (std::size_t v = 0; v < p_; ++v) s += local(v, dag.parent_mask(v));
  return s;
}

double bic_score(const Eigen::MatrixXd& data, const Dag& dag) { return BicScorer(data).score(dag); }

}  // namespace cardiocausal
