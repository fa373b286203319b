#include "cardiocausal/param_features.hpp"

#include <algorithm>
#include <cmath>

#include "cardiocausal/dsp.hpp"
#include "cardiocausal/hypothesis_tests.hpp"

namespace cardiocausal {

namespace {

constexpr std::size_t kMinIntervals = 3;
constexpr std::size_t kMinBreaths = 5;
constexpr std::size_t kMinPairs = 8;
constexpr double kNormalityAlpha = 0.05;

CardiacParams from_moments(std::span<const double> rr, std::span<const double> diffs) {
  if (rr.size() < kMinIntervals) throw InvalidInput("at least 3 clean R-R intervals are required");
  const double mean_rr = dsp::mean(rr);
  if (!(mean_rr > 0.0)) throw InvalidInput("R-R intervals must be positive");
  if (diffs.empty()) throw InvalidInput("no successive R-R differences available");
  double ss = 0.0;
  for (double d : diffs) ss += d * d;
  const double rmssd = std::sqrt(ss / static_cast<double>(diffs.size()));
  if (rmssd == 0.0) throw InvalidInput("RMSSD is zero; lnRMSSD undefined");
  return {60000.0 / mean_rr, rmssd, std::log(rmssd)};
}

}  // namespace

ParamValues ParamVector::values() const {
  return {hr_bpm, rmssd_ms, ln_rmssd, rr_brpm, ci_rr, c_ins_t, c_exp_t, c_ins_v, c_exp_v, br_percent};
}

double coefficient_of_variation(std::span<const double> x) {
  const double m = dsp::mean(x);
  if (!(m > 0.0)) throw InvalidInput("coefficient of variation needs a positive mean");
  return std::sqrt(dsp::population_variance(x)) / m;
}

CardiacParams cardiac_params(std::span<const double> rr_ms) {
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < rr_ms.size(); ++i) diffs.push_back(rr_ms[i + 1] - rr_ms[i]);
  return from_moments(rr_ms, diffs);
}

CardiacParams cardiac_params(const RrSeries& rr) {
  auto clean = rr.clean();
  auto diffs = rr.clean_successive_differences();
  return from_moments(clean, diffs);
}

RespiratoryParams respiratory_params(const BreathSeries& breaths) {
  if (breaths.complete_breaths() < kMinBreaths) throw InvalidInput("at least 5 complete breaths are required");
  RespiratoryParams out;
  out.rr_brpm = 60.0 / dsp::mean(breaths.i_rr_s);
  out.cv.cv_irr = coefficient_of_variation(breaths.i_rr_s);
  out.cv.cv_ins_t = coefficient_of_variation(breaths.ins_t_s);
  out.cv.cv_exp_t = coefficient_of_variation(breaths.exp_t_s);
  out.cv.cv_ins_v = coefficient_of_variation(breaths.ins_v);
  out.cv.cv_exp_v = coefficient_of_variation(breaths.exp_v);
  return out;
}

double breathing_regularity(const CvSet& cv) {
  const double sum = std::tanh(cv.cv_irr) + std::tanh(cv.cv_ins_t) + std::tanh(cv.cv_exp_t) +
                     std::tanh(cv.cv_ins_v) + std::tanh(cv.cv_exp_v);
  return std::clamp(100.0 - 20.0 * sum, 0.0, 100.0);
}

ParamVector assemble_params(const CardiacParams& cardiac, const RespiratoryParams& resp) {
  ParamVector p;
  p.hr_bpm = cardiac.hr_bpm;
  p.rmssd_ms = cardiac.rmssd_ms;
  p.ln_rmssd = cardiac.ln_rmssd;
  p.rr_brpm = resp.rr_brpm;
  p.ci_rr = resp.cv.cv_irr;
  p.c_ins_t = resp.cv.cv_ins_t;
  p.c_exp_t = resp.cv.cv_exp_t;
  p.c_ins_v = resp.cv.cv_ins_v;
  p.c_exp_v = resp.cv.cv_exp_v;
  p.br_percent = breathing_regularity(resp.cv);
  return p;
}

PairedTestResult paired_compare(std::span<const double> supine, std::span<const double> standing,
                                Parameter parameter) {
  if (supine.size() != standing.size()) throw InvalidInput("paired samples differ in length");
  if (supine.size() < kMinPairs) throw InvalidInput("paired comparison needs at least 8 pairs");
  std::vector<double> d(supine.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = standing[i] - supine[i];
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
    throw InvalidInput("all paired differences are zero");
  }

  PairedTestResult res{parameter, PairedTest::PairedT, 0.0, 1.0, 1.0};
  // A constant shift has zero spread; it is treated as (degenerately) normal.
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  if (*hi > *lo) res.normality_p = stats::shapiro_wilk(d).p_value;

  if (res.normality_p >= kNormalityAlpha) {
    auto t = stats::one_sample_t(d);
    res.statistic = t.statistic;
    res.p_value = t.p_value;
  } else {
    auto w = stats::wilcoxon_signed_rank(d);
    res.test_used = PairedTest::WilcoxonSignedRank;
    res.statistic = w.statistic;
    res.p_value = w.p_value;
  }
  return res;
}

std::string to_string(PairedTest t) {
  return t == PairedTest::PairedT ? "paired_t" : "wilcoxon_signed_rank";
}

}  // namespace cardiocausal
