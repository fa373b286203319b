#include "cardiocausal/cardio_signals.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>

#include "cardiocausal/dsp.hpp"

namespace cardiocausal {

namespace {

constexpr double kMinDetectorRateHz = 100.0;
constexpr double kMinDetectorSeconds = 10.0;
constexpr double kMinRrMs = 200.0;
constexpr double kMaxRrMs = 3000.0;
constexpr double kMaxLocalDeviation = 0.40;
constexpr std::size_t kRrAverageBeats = 8;

std::size_t odd_width(double seconds, double rate) {
  auto half = static_cast<std::size_t>(std::lround(seconds * rate / 2.0));
  return 2 * half + 1;
}

void require_finite(std::span<const double> x) {
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInput("non-finite ECG sample");
  }
}

// x[n - half] minus the mean of x[n - 2 half .. n]: a linear-phase high-pass.
std::vector<double> moving_difference_highpass(std::span<const double> x, std::size_t half) {
  const std::size_t width = 2 * half + 1;
  auto avg = dsp::causal_boxcar(x, width);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double delayed = i >= half ? x[i - half] : 0.0;
    out[i] = delayed - avg[i];
  }
  return out;
}

// Five-point derivative, causal: (2x[n] + x[n-1] - x[n-3] - 2x[n-4]) fs / 8.
std::vector<double> five_point_derivative(std::span<const double> x, double rate) {
  auto at = [&](std::size_t i, std::size_t lag) { return i >= lag ? x[i - lag] : 0.0; };
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (2.0 * at(i, 0) + at(i, 1) - at(i, 3) - 2.0 * at(i, 4)) * rate / 8.0;
  }
  return out;
}

struct Candidate {
  std::size_t index;
  double height;
};

// Points that dominate a +-radius neighbourhood of the integrated waveform.
std::vector<Candidate> find_candidates(const std::vector<double>& mwi, std::size_t radius) {
  std::vector<Candidate> out;
  const std::size_t n = mwi.size();
  for (std::size_t i = 0; i < n; ++i) {
    double h = mwi[i];
    if (!(h > 0.0)) continue;
    bool peak = true;
    std::size_t lo = i >= radius ? i - radius : 0;
    for (std::size_t j = lo; j < i && peak; ++j) peak = h > mwi[j];
    std::size_t hi = std::min(n, i + radius + 1);
    for (std::size_t j = i + 1; j < hi && peak; ++j) peak = h >= mwi[j];
    if (peak) out.push_back({i, h});
  }
  return out;
}

}  // namespace

std::vector<double> RrSeries::clean() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < intervals_ms.size(); ++i) {
    if (!is_artifact[i]) out.push_back(intervals_ms[i]);
  }
  return out;
}

std::vector<double> RrSeries::clean_successive_differences() const {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < intervals_ms.size(); ++i) {
    if (!is_artifact[i] && !is_artifact[i + 1]) out.push_back(intervals_ms[i + 1] - intervals_ms[i]);
  }
  return out;
}

std::vector<double> detrend_ecg(std::span<const double> samples, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw InvalidInput("sample rate must be positive");
  if (static_cast<double>(samples.size()) < 2.0 * sample_rate_hz) {
    throw InvalidInput("ECG shorter than 2 s cannot be detrended");
  }
  require_finite(samples);
  auto stage1 = dsp::median_filter(samples, odd_width(0.2, sample_rate_hz));
  auto baseline = dsp::median_filter(stage1, odd_width(0.6, sample_rate_hz));
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i] - baseline[i];
  return out;
}

BeatSeries detect_r_peaks(std::span<const double> samples, double sample_rate_hz,
                          const QrsDetectorConfig& config) {
  const double fs = sample_rate_hz;
  if (!(fs >= kMinDetectorRateHz)) throw InvalidInput("QRS detection needs at least 100 Hz sampling");
  if (static_cast<double>(samples.size()) < kMinDetectorSeconds * fs) {
    throw InvalidInput("QRS detection needs at least 10 s of signal");
  }
  require_finite(samples);
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  if (*lo_it == *hi_it) throw Error("no detectable beats: flat ECG");

  // Band-pass: twice-applied boxcar low-pass, then moving-difference high-pass.
  const auto lp_width = static_cast<std::size_t>(std::max(1L, std::lround(config.lowpass_boxcar_s * fs)));
  const auto hp_half = static_cast<std::size_t>(std::lround(config.highpass_half_window_s * fs));
  auto lp = dsp::causal_boxcar(dsp::causal_boxcar(samples, lp_width), lp_width);
  auto bp = moving_difference_highpass(lp, hp_half);
  auto deriv = five_point_derivative(bp, fs);
  std::vector<double> squared(deriv.size());
  std::transform(deriv.begin(), deriv.end(), squared.begin(), [](double v) { return v * v; });
  const auto mwi_width = static_cast<std::size_t>(std::max(1L, std::lround(config.integration_window_s * fs)));
  auto mwi = dsp::causal_boxcar(squared, mwi_width);

  const std::size_t bp_delay = (lp_width - 1) + hp_half;
  const std::size_t deriv_delay = bp_delay + 2;
  const auto refractory = static_cast<std::size_t>(std::lround(config.refractory_s * fs));
  const auto t_wave = static_cast<std::size_t>(std::lround(config.t_wave_window_s * fs));

  auto first_active = std::find_if(mwi.begin(), mwi.end(), [](double v) { return v > 0.0; });
  if (first_active == mwi.end()) throw Error("no detectable beats: flat ECG");

  // Learning phase: the first 2 s of activity seed the running peak levels.
  const auto start = static_cast<std::size_t>(first_active - mwi.begin());
  const std::size_t learn_end =
      std::min(mwi.size(), start + static_cast<std::size_t>(std::lround(config.learning_window_s * fs)));
  double learn_max = 0.0, learn_sum = 0.0;
  for (std::size_t i = start; i < learn_end; ++i) {
    learn_max = std::max(learn_max, mwi[i]);
    learn_sum += mwi[i];
  }
  double spki = 0.25 * learn_max;
  double npki = 0.5 * learn_sum / static_cast<double>(learn_end - start);
  double threshold1 = npki + config.threshold_fraction * (spki - npki);
  double threshold2 = 0.5 * threshold1;
  auto update_thresholds = [&] {
    threshold1 = npki + config.threshold_fraction * (spki - npki);
    threshold2 = 0.5 * threshold1;
  };

  auto slope_at = [&](std::size_t idx) {
    std::size_t lo = idx + 1 >= mwi_width ? idx + 1 - mwi_width : 0;
    double s = 0.0;
    for (std::size_t j = lo; j <= idx; ++j) s = std::max(s, std::abs(deriv[j]));
    return s;
  };

  const auto candidates = find_candidates(mwi, refractory);
  std::vector<std::size_t> qrs;  // candidate positions in `candidates`
  std::vector<double> qrs_slopes;
  std::deque<double> recent_rr;
  double rr_average = 0.0;

  auto accept = [&](std::size_t ci, double weight) {
    const auto& c = candidates[ci];
    if (!qrs.empty()) {
      double rr = static_cast<double>(c.index - candidates[qrs.back()].index);
      recent_rr.push_back(rr);
      if (recent_rr.size() > kRrAverageBeats) recent_rr.pop_front();
      rr_average = std::accumulate(recent_rr.begin(), recent_rr.end(), 0.0) /
                   static_cast<double>(recent_rr.size());
    }
    spki = weight * c.height + (1.0 - weight) * spki;
    qrs.push_back(ci);
    qrs_slopes.push_back(slope_at(c.index));
    update_thresholds();
  };

  // Look back between the last beat and `limit` for a peak above the
  // secondary threshold when the expected beat is overdue.
  auto search_back = [&](std::size_t limit_ci, std::size_t limit_index) {
    while (!qrs.empty() && rr_average > 0.0) {
      const std::size_t last = candidates[qrs.back()].index;
      if (static_cast<double>(limit_index - last) <= config.searchback_factor * rr_average) return;
      std::optional<std::size_t> best;
      for (std::size_t k = qrs.back() + 1; k < limit_ci; ++k) {
        const auto& c = candidates[k];
        if (c.index < last + refractory || c.height < threshold2) continue;
        if (!best || c.height > candidates[*best].height) best = k;
      }
      if (!best) return;
      accept(*best, config.searchback_update_weight);
    }
  };

  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const auto& c = candidates[ci];
    search_back(ci, c.index);
    if (!qrs.empty() && qrs.back() >= ci) continue;  // taken during search-back
    if (c.height >= threshold1) {
      if (!qrs.empty()) {
        const std::size_t last = candidates[qrs.back()].index;
        if (c.index < last + refractory) continue;
        if (c.index < last + t_wave && slope_at(c.index) < 0.5 * qrs_slopes.back()) {
          npki = config.peak_update_weight * c.height + (1.0 - config.peak_update_weight) * npki;
          update_thresholds();
          continue;
        }
      }
      accept(ci, config.peak_update_weight);
    } else {
      npki = config.peak_update_weight * c.height + (1.0 - config.peak_update_weight) * npki;
      update_thresholds();
    }
  }
  search_back(candidates.size(), mwi.size());
  if (qrs.empty()) throw Error("no detectable beats");

  // Refine each beat to the band-passed maximum inside its integration
  // window, then undo the linear-phase filter delay.
  BeatSeries beats;
  long last_peak = -1;
  for (std::size_t ci : qrs) {
    const std::size_t idx = candidates[ci].index;
    const std::size_t margin = refractory / 4;
    std::size_t hi = std::min(bp.size() - 1, idx - std::min(idx, deriv_delay - bp_delay) + margin);
    std::size_t lo = idx >= mwi_width + margin ? idx - mwi_width - margin : 0;
    std::size_t arg = lo;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (bp[j] > bp[arg]) arg = j;
    }
    if (arg < bp_delay) continue;
    const long peak = static_cast<long>(arg - bp_delay);
    if (last_peak >= 0 && peak - last_peak < static_cast<long>(refractory)) continue;
    beats.r_peak_times_s.push_back(static_cast<double>(peak) / fs);
    last_peak = peak;
  }
  if (beats.r_peak_times_s.empty()) throw Error("no detectable beats");
  for (std::size_t i = 0; i + 1 < beats.r_peak_times_s.size(); ++i) {
    beats.rr_intervals_ms.push_back(1000.0 * (beats.r_peak_times_s[i + 1] - beats.r_peak_times_s[i]));
  }
  return beats;
}

RrSeries rr_intervals(const BeatSeries& beats) {
  const auto& t = beats.r_peak_times_s;
  if (t.size() < 2) throw InvalidInput("at least two R peaks are needed for R-R intervals");
  RrSeries out;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) out.intervals_ms.push_back(1000.0 * (t[i + 1] - t[i]));
  const std::size_t n = out.intervals_ms.size();
  out.is_artifact.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double v = out.intervals_ms[i];
    if (!(v > kMinRrMs && v < kMaxRrMs)) {
      out.is_artifact[i] = true;
      continue;
    }
    std::size_t lo = i >= 2 ? i - 2 : 0;
    std::size_t hi = std::min(n, i + 3);
    std::vector<double> local(out.intervals_ms.begin() + static_cast<std::ptrdiff_t>(lo),
                              out.intervals_ms.begin() + static_cast<std::ptrdiff_t>(hi));
    double med = dsp::median(std::move(local));
    if (std::abs(v - med) > kMaxLocalDeviation * med) out.is_artifact[i] = true;
  }
  return out;
}

}  // namespace cardiocausal
