#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cardiocausal/record_io.hpp"
#include "cardiocausal/types.hpp"

namespace cardiocausal {

/// Flat-prior Bayesian fit of X = alpha + beta * Y + eps.
struct BayesRegressionFit {
  double alpha_hat;
  double beta_hat;
  double sigma_x;
  double sigma_y;
  double r;    // beta_hat * sigma_y / sigma_x
  double mpe;  // max(P(beta > 0), P(beta < 0)) under the Student-t posterior
};

/// Under the non-informative conjugate prior the posterior of beta is
/// Student t with n - 2 degrees of freedom centred on the least-squares
/// slope, so r coincides with Pearson's coefficient. Needs n >= 4 and
/// nonzero variance in both inputs.
BayesRegressionFit bayes_correlation(std::span<const double> x, std::span<const double> y);

/// Entries are present only where the fit clears the gate. Diagonal is empty.
using CorrelationMatrix = std::array<std::array<std::optional<double>, kParameterCount>, kParameterCount>;

inline constexpr double kMpeGate = 0.9;

/// Bayesian correlation between every pair of parameter columns of one
/// position. Throws InvalidInput with fewer than 4 subjects.
CorrelationMatrix correlation_matrix(const ParameterTable& table, Position position, double mpe_gate = kMpeGate);

/// CSV with a leading name column; absent entries are blank cells.
std::string correlation_csv(const CorrelationMatrix& m);

enum class Direction { XcausesY, YcausesX, Undecided };

std::string to_string(Direction d);

struct GeneralizedCorrPair {
  double r_pearson;
  double r_star_y_given_x;
  double r_star_x_given_y;
  double gmc_y_given_x;
  double gmc_x_given_y;
  Direction direction;
  double gate_p;
};

/// Leave-one-out Nadaraya-Watson estimate of E(y | x) at every sample, with a
/// Gaussian kernel and Silverman's bandwidth 1.06 * sd(x) * n^(-1/5).
std::vector<double> kernel_conditional_mean(std::span<const double> x, std::span<const double> y);

/// Generalized measure of correlation of y given x: 1 - E(y - E(y|x))^2 / var(y),
/// clamped to [0, 1].
double generalized_measure(std::span<const double> x, std::span<const double> y);

inline constexpr double kDirectionAlpha = 0.05;

/// Generalized correlations in both directions and the kernel-cause rule:
/// the variable whose conditional mean better explains the other is the
/// kernel cause, provided the gate p-value is below 0.05. The gate is the
/// correlation t test (n - 2 df) applied to the larger |r*|. Needs n >= 20.
GeneralizedCorrPair generalized_corr_pair(std::span<const double> x, std::span<const double> y);

}  // namespace cardiocausal
