#pragma once

#include <span>
#include <vector>

#include "cardiocausal/types.hpp"

namespace cardiocausal {

/// Breathing phases delimited on a cleaned impedance signal.
///
/// Inspiratory onsets interleave with expiratory onsets
/// (insp[i] < exp[i] < insp[i+1]); the series always ends on an inspiratory
/// onset, so there is one fewer expiratory onset. Amplitudes are relative
/// impedance changes, never calibrated volumes.
struct BreathSeries {
  std::vector<double> insp_onsets_s;
  std::vector<double> exp_onsets_s;
  std::vector<double> ins_t_s;
  std::vector<double> exp_t_s;
  std::vector<double> ins_v;
  std::vector<double> exp_v;
  std::vector<double> i_rr_s;

  std::size_t complete_breaths() const { return i_rr_s.size(); }
};

struct CardiacCancellerConfig {
  double taps_s = 0.2;       // 50 taps at 250 Hz
  double step = 0.05;        // normalized LMS step
  double smoothing_s = 0.4;  // centered moving average after cancellation
  double adaptation_cutoff_hz = 0.6;  // weights adapt on signals above this
};

/// Normalized-LMS estimate of the ECG-correlated component of `ip`,
/// subtracted from `ip`. The filter adapts on zero-phase high-passed copies
/// of both channels, so the estimate carries no respiratory-band content.
/// No smoothing.
std::vector<double> cancel_cardiac_artifact(std::span<const double> ip, std::span<const double> ecg,
                                            double sample_rate_hz, const CardiacCancellerConfig& config = {});

/// Adaptive cardiac-artifact cancellation followed by a centered 400 ms
/// moving average (edges mirrored). Same length as the input.
std::vector<double> remove_cardiac_component(std::span<const double> ip, std::span<const double> ecg,
                                             double sample_rate_hz, const CardiacCancellerConfig& config = {});

struct BreathDelimiterConfig {
  double hysteresis_fraction = 0.2;   // of the rolling flow standard deviation
  double rolling_window_s = 10.0;
  double min_ins_t_s = 0.5;
  double min_relative_amplitude = 0.1;  // of the running median amplitude
  std::size_t running_median_breaths = 7;
};

/// Segments the flow surrogate (central difference of `ip_clean`) into
/// inspirations and expirations. Partial breaths at both ends are dropped;
/// breaths with a short inspiration or a small amplitude are merged into the
/// surrounding expiration. Throws Error when fewer than 3 complete breaths
/// remain.
BreathSeries delimit_breaths(std::span<const double> ip_clean, double sample_rate_hz,
                             const BreathDelimiterConfig& config = {});

/// Indices of breaths (inspiration i spanning insp_onsets[i]..exp_onsets[i])
/// violating the duration or running-median amplitude rule.
std::vector<std::size_t> rejected_breaths(std::span<const double> ins_t_s, std::span<const double> ins_v,
                                          const BreathDelimiterConfig& config = {});

}  // namespace cardiocausal
