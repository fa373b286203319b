#pragma once

#include <span>
#include <string>

#include "cardiocausal/cardio_signals.hpp"
#include "cardiocausal/resp_signals.hpp"
#include "cardiocausal/types.hpp"

namespace cardiocausal {

/// Coefficients of variation (population sigma over mean) of the breath
/// series fields.
struct CvSet {
  double cv_irr = 0.0;
  double cv_ins_t = 0.0;
  double cv_exp_t = 0.0;
  double cv_ins_v = 0.0;
  double cv_exp_v = 0.0;
};

struct CardiacParams {
  double hr_bpm;
  double rmssd_ms;
  double ln_rmssd;
};

struct RespiratoryParams {
  double rr_brpm;
  CvSet cv;
};

/// All ten per-recording parameters.
struct ParamVector {
  double hr_bpm = 0.0;
  double rmssd_ms = 0.0;
  double ln_rmssd = 0.0;
  double rr_brpm = 0.0;
  double ci_rr = 0.0;
  double c_ins_t = 0.0;
  double c_exp_t = 0.0;
  double c_ins_v = 0.0;
  double c_exp_v = 0.0;
  double br_percent = 0.0;

  ParamValues values() const;
};

/// Heart rate, RMSSD and its natural log from clean R-R intervals (ms).
/// Throws InvalidInput for fewer than 3 intervals or zero RMSSD.
CardiacParams cardiac_params(std::span<const double> rr_ms);

/// As above, but differences are only taken between adjacent clean intervals.
CardiacParams cardiac_params(const RrSeries& rr);

/// Needs at least 5 complete breaths.
RespiratoryParams respiratory_params(const BreathSeries& breaths);

/// BR = 100 - 20 * sum of tanh(cv) over the five coefficients; in [0, 100].
double breathing_regularity(const CvSet& cv);

ParamVector assemble_params(const CardiacParams& cardiac, const RespiratoryParams& resp);

/// Population coefficient of variation, sigma / mean.
double coefficient_of_variation(std::span<const double> x);

enum class PairedTest { PairedT, WilcoxonSignedRank };

struct PairedTestResult {
  Parameter parameter;
  PairedTest test_used;
  double statistic;
  double p_value;
  double normality_p;  // Shapiro-Wilk on the paired differences
};

/// Supine-vs-standing comparison: paired t when the differences pass
/// Shapiro-Wilk at 0.05, otherwise the Wilcoxon signed-rank test.
PairedTestResult paired_compare(std::span<const double> supine, std::span<const double> standing,
                                Parameter parameter);

std::string to_string(PairedTest t);

}  // namespace cardiocausal
