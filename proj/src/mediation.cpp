#include "cardiocausal/mediation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "cardiocausal/types.hpp"

namespace cardiocausal {

namespace {

constexpr std::size_t kMinSamples = 10;

struct Ols {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
};

/// Least squares with an intercept column prepended; coefficients and
/// standard errors exclude the intercept.
Ols ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto n = x.rows();
  const auto k = x.cols();
  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = x;
  const Eigen::MatrixXd xtx = design.transpose() * design;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const Eigen::VectorXd d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * d.maxCoeff()) {
    throw InvalidInput("mediation regressors are degenerate or collinear");
  }
  const Eigen::VectorXd beta = ldlt.solve(design.transpose() * y);
  const double rss = (y - design * beta).squaredNorm();
  const double s2 = rss / static_cast<double>(n - k - 1);
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
  Ols out;
  out.coef = beta.tail(k);
  out.se = (s2 * inv.diagonal().tail(k)).cwiseSqrt();
  return out;
}

Eigen::VectorXd to_vector(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace

double sobel_p_value(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

MediationFit mediation_fit(std::span<const double> x, std::span<const double> m, std::span<const double> y,
                           std::array<std::string, 3> path) {
  if (x.size() != m.size() || x.size() != y.size()) throw InvalidInput("mediation inputs differ in length");
  if (x.size() < kMinSamples) throw InvalidInput("mediation needs at least 10 samples");
  const Eigen::VectorXd xv = to_vector(x);
  const Eigen::VectorXd mv = to_vector(m);
  const Eigen::VectorXd yv = to_vector(y);
  if (!xv.allFinite() || !mv.allFinite() || !yv.allFinite()) throw InvalidInput("mediation inputs must be finite");

  const Ols first = ols(xv, mv);
  Eigen::MatrixXd both(xv.size(), 2);
  both.col(0) = mv;
  both.col(1) = xv;
  const Ols second = ols(both, yv);

  MediationFit f;
  f.path = std::move(path);
  f.a_hat = first.coef(0);
  f.se_a = first.se(0);
  f.b_hat = second.coef(0);
  f.se_b = second.se(0);
  f.direct_effect = second.coef(1);
  f.indirect_effect = f.a_hat * f.b_hat;
  const double denom = std::sqrt(f.b_hat * f.b_hat * f.se_a * f.se_a + f.a_hat * f.a_hat * f.se_b * f.se_b);
  if (denom > 0.0) {
    f.sobel_z = f.indirect_effect / denom;
  } else if (f.indirect_effect == 0.0) {
    f.sobel_z = 0.0;
  } else {
    f.sobel_z = std::copysign(std::numeric_limits<double>::infinity(), f.indirect_effect);
  }
  f.sobel_p = sobel_p_value(f.sobel_z);
  return f;
}

}  // namespace cardiocausal
