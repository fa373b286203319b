#pragma once

#include <span>
#include <vector>

#include "cardiocausal/types.hpp"

namespace cardiocausal {

/// R-peak times and the successive R-R intervals between them.
struct BeatSeries {
  std::vector<double> r_peak_times_s;
  std::vector<double> rr_intervals_ms;
};

/// Successive R-R intervals with a per-interval artifact flag.
struct RrSeries {
  std::vector<double> intervals_ms;
  std::vector<bool> is_artifact;

  /// Intervals not flagged as artifacts, in order.
  std::vector<double> clean() const;
  /// Successive differences between adjacent intervals that are both clean.
  std::vector<double> clean_successive_differences() const;
};

/// Subtracts a baseline estimated by cascaded 200 ms and 600 ms median
/// filters. Requires at least 2 s of finite samples.
std::vector<double> detrend_ecg(std::span<const double> samples, double sample_rate_hz);

/// Tunable constants of the QRS detector. Defaults are the published
/// Pan-Tompkins values.
struct QrsDetectorConfig {
  double lowpass_boxcar_s = 0.030;   // applied twice
  double highpass_half_window_s = 0.080;
  double integration_window_s = 0.150;
  double refractory_s = 0.200;
  double t_wave_window_s = 0.360;
  double learning_window_s = 2.0;
  double searchback_factor = 1.66;
  double threshold_fraction = 0.25;
  double peak_update_weight = 0.125;
  double searchback_update_weight = 0.25;
};

/// Pan-Tompkins R-peak detection on a detrended ECG.
///
/// Throws InvalidInput for sample rates below 100 Hz or records shorter than
/// 10 s, and Error when no beat can be found.
BeatSeries detect_r_peaks(std::span<const double> samples, double sample_rate_hz,
                          const QrsDetectorConfig& config = {});

/// Intervals between successive peaks. An interval is an artifact when it lies
/// outside (200, 3000) ms or deviates more than 40% from the median of the
/// five intervals centered on it.
RrSeries rr_intervals(const BeatSeries& beats);

}  // namespace cardiocausal
