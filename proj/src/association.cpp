#include "cardiocausal/association.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cardiocausal/dsp.hpp"
#include "cardiocausal/hypothesis_tests.hpp"

namespace cardiocausal {

namespace {

constexpr std::size_t kMinBayesSamples = 4;
constexpr std::size_t kMinKernelSamples = 20;

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) throw InvalidInput("paired sequences differ in length");
  if (x.size() < min_n) throw InvalidInput("too few observations: need at least " + std::to_string(min_n));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidInput("non-finite observation");
  }
}

double sum_sq_dev(std::span<const double> v, double m) {
  double s = 0.0;
  for (double e : v) s += (e - m) * (e - m);
  return s;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

BayesRegressionFit bayes_correlation(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, kMinBayesSamples);
  const double n = static_cast<double>(x.size());
  const double mx = dsp::mean(x), my = dsp::mean(y);
  const double sxx = sum_sq_dev(x, mx), syy = sum_sq_dev(y, my);
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InvalidInput("zero variance");
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);

  BayesRegressionFit fit{};
  fit.beta_hat = sxy / syy;
  fit.alpha_hat = mx - fit.beta_hat * my;
  fit.sigma_x = std::sqrt(sxx / (n - 1.0));
  fit.sigma_y = std::sqrt(syy / (n - 1.0));
  fit.r = std::clamp(fit.beta_hat * fit.sigma_y / fit.sigma_x, -1.0, 1.0);

  const double rss = std::max(0.0, sxx - fit.beta_hat * sxy);
  const double df = n - 2.0;
  const double se = std::sqrt(rss / df / syy);
  if (se == 0.0) {
    fit.mpe = fit.beta_hat == 0.0 ? 0.5 : 1.0;
  } else {
    fit.mpe = stats::student_t_cdf(std::abs(fit.beta_hat) / se, df);
  }
  return fit;
}

CorrelationMatrix correlation_matrix(const ParameterTable& table, Position position, double mpe_gate) {
  std::array<std::vector<double>, kParameterCount> columns;
  for (auto p : kAllParameters) columns[index_of(p)] = table.column(p, position);
  if (columns[0].size() < kMinBayesSamples) {
    throw InvalidInput("correlation matrix needs at least 4 subjects in position " +
                       std::string(name_of(position)));
  }
  CorrelationMatrix m{};
  for (std::size_t i = 0; i < kParameterCount; ++i) {
    for (std::size_t j = i + 1; j < kParameterCount; ++j) {
      auto fit = bayes_correlation(columns[i], columns[j]);
      if (fit.mpe > mpe_gate) m[i][j] = m[j][i] = fit.r;
    }
  }
  return m;
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "parameter";
  for (auto name : kParameterNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < kParameterCount; ++i) {
    out << kParameterNames[i];
    for (std::size_t j = 0; j < kParameterCount; ++j) {
      out << ',';
      if (m[i][j]) out << format_decimal(*m[i][j]);
    }
    out << '\n';
  }
  return out.str();
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::XcausesY: return "x_causes_y";
    case Direction::YcausesX: return "y_causes_x";
    default: return "undecided";
  }
}

std::vector<double> kernel_conditional_mean(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, kMinKernelSamples);
  const std::size_t n = x.size();
  const double sd = std::sqrt(sum_sq_dev(x, dsp::mean(x)) / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw InvalidInput("zero variance in the conditioning variable");
  const double h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  const double inv2h2 = 1.0 / (2.0 * h * h);

  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = x[i] - x[j];
      const double w = std::exp(-d * d * inv2h2);
      num += w * y[j];
      den += w;
    }
    // An isolated point gets no support from its neighbours; fall back to
    // the leave-one-out mean.
    if (den > 0.0) {
      fitted[i] = num / den;
    } else {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) s += y[j];
      }
      fitted[i] = s / static_cast<double>(n - 1);
    }
  }
  return fitted;
}

double generalized_measure(std::span<const double> x, std::span<const double> y) {
  auto fitted = kernel_conditional_mean(x, y);
  const double syy = sum_sq_dev(y, dsp::mean(y));
  if (!(syy > 0.0)) throw InvalidInput("zero variance in the response");
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  return std::clamp(1.0 - rss / syy, 0.0, 1.0);
}

GeneralizedCorrPair generalized_corr_pair(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, kMinKernelSamples);
  GeneralizedCorrPair out{};
  out.r_pearson = bayes_correlation(x, y).r;
  out.gmc_y_given_x = generalized_measure(x, y);
  out.gmc_x_given_y = generalized_measure(y, x);
  const double s = sign_of(out.r_pearson);
  out.r_star_y_given_x = s * std::sqrt(out.gmc_y_given_x);
  out.r_star_x_given_y = s * std::sqrt(out.gmc_x_given_y);

  const double a = std::abs(out.r_star_y_given_x), b = std::abs(out.r_star_x_given_y);
  out.gate_p = stats::pearson_p_value(std::max(a, b), x.size());
  out.direction = Direction::Undecided;
  if (out.gate_p < kDirectionAlpha) {
    if (b > a) out.direction = Direction::YcausesX;
    if (a > b) out.direction = Direction::XcausesY;
  }
  return out;
}

}  // namespace cardiocausal
