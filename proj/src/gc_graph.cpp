#include <algorithm>
#include <vector>

#include "cardiocausal/association.hpp"
#include "cardiocausal/structure_search.hpp"

namespace cardiocausal {

GcGraph gc_graph(const Eigen::MatrixXd& data, const std::vector<std::string>& names) {
  const auto p = static_cast<std::size_t>(data.cols());
  if (names.size() != p) throw InvalidInput("column name count does not match data");
  GcGraph out;
  out.graph.nodes = p;
  std::vector<std::vector<double>> cols(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto c = data.col(static_cast<Eigen::Index>(j));
    cols[j].assign(c.data(), c.data() + c.size());
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      try {
        const auto r = generalized_corr_pair(cols[a], cols[b]);
        if (r.direction == Direction::XcausesY) out.graph.directed.push_back({a, b});
        if (r.direction == Direction::YcausesX) out.graph.directed.push_back({b, a});
      } catch (const Error& e) {
        out.warnings.push_back("generalized correlation " + names[a] + "-" + names[b] + " skipped: " + e.what());
      }
    }
  }
  std::sort(out.graph.directed.begin(), out.graph.directed.end());
  return out;
}

GcGraph gc_graph(const ParameterTable& table, Position position) {
  const auto rows = table.rows_for(position);
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kParameterCount));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < kParameterCount; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    }
  }
  std::vector<std::string> names(kParameterNames.begin(), kParameterNames.end());
  return gc_graph(data, names);
}

}  // namespace cardiocausal
