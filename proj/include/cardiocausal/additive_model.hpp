#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace cardiocausal::gam {

/// Sum-to-zero constrained cubic B-spline basis for one covariate, with the
/// integrated squared second derivative penalty in the same coordinates.
struct SmoothTerm {
  Eigen::MatrixXd design;   // n x (k - 1)
  Eigen::MatrixXd penalty;  // (k - 1) x (k - 1)
};

/// `basis_size` cubic B-splines on equally spaced knots over [min x, max x].
SmoothTerm cubic_spline_term(const Eigen::VectorXd& x, int basis_size = 10);

struct AdditiveFit {
  Eigen::VectorXd fitted;
  std::vector<double> lambdas;
  double rss = 0.0;
  double edf = 0.0;
  double gcv = 0.0;
};

/// Penalized least squares y ~ 1 + sum_j f_j(x_j). Without `lambdas` the
/// smoothing parameters are chosen by GCV with a coordinate search over a
/// log-spaced grid.
AdditiveFit fit_additive(const Eigen::VectorXd& y, const std::vector<const SmoothTerm*>& terms,
                         const std::optional<std::vector<double>>& lambdas = {});

/// Approximate F-test p-value of each smooth term: the fit is compared with
/// the model that drops the term, other smoothing parameters held fixed.
std::vector<double> term_p_values(const Eigen::VectorXd& y, const std::vector<const SmoothTerm*>& terms,
                                  const AdditiveFit& full);

}  // namespace cardiocausal::gam
