#include "cardiocausal/resp_signals.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cardiocausal/dsp.hpp"

namespace cardiocausal {

namespace {

constexpr double kMinRespSeconds = 30.0;
constexpr std::size_t kMinCompleteBreaths = 3;

void check_channel(std::span<const double> x, const char* what) {
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInput(std::string("non-finite sample in ") + what);
  }
}

double interpolate(std::span<const double> x, double index) {
  auto k = static_cast<std::size_t>(std::floor(index));
  if (k + 1 >= x.size()) return x.back();
  double frac = index - static_cast<double>(k);
  return x[k] + frac * (x[k + 1] - x[k]);
}

enum class Phase { Unknown, Inspiration, Expiration };

struct Onsets {
  std::vector<double> insp;  // fractional sample indices
  std::vector<double> exp;
};

Onsets segment_phases(std::span<const double> flow, std::span<const double> threshold) {
  struct Event {
    Phase phase;
    std::optional<double> at;
  };
  std::vector<Event> events;
  Phase state = Phase::Unknown;
  std::optional<double> last_up, last_down;
  for (std::size_t n = 0; n < flow.size(); ++n) {
    if (n > 0) {
      double a = flow[n - 1], b = flow[n];
      if (a <= 0.0 && b > 0.0) last_up = static_cast<double>(n - 1) + a / (a - b);
      if (a >= 0.0 && b < 0.0) last_down = static_cast<double>(n - 1) + a / (a - b);
    }
    if (flow[n] > threshold[n] && state != Phase::Inspiration) {
      events.push_back({Phase::Inspiration, last_up});
      state = Phase::Inspiration;
    } else if (flow[n] < -threshold[n] && state != Phase::Expiration) {
      events.push_back({Phase::Expiration, last_down});
      state = Phase::Expiration;
    }
  }
  // The first phase started before the recording did.
  if (!events.empty()) events.erase(events.begin());
  while (!events.empty() && events.front().phase != Phase::Inspiration) events.erase(events.begin());
  while (!events.empty() && events.back().phase != Phase::Inspiration) events.pop_back();

  Onsets out;
  for (const auto& e : events) {
    if (!e.at) continue;
    (e.phase == Phase::Inspiration ? out.insp : out.exp).push_back(*e.at);
  }
  return out;
}

}  // namespace

std::vector<double> cancel_cardiac_artifact(std::span<const double> ip, std::span<const double> ecg,
                                            double sample_rate_hz, const CardiacCancellerConfig& config) {
  if (ip.size() != ecg.size()) throw InvalidInput("ip and ecg lengths differ");
  if (!(sample_rate_hz > 0.0)) throw InvalidInput("sample rate must be positive");
  if (static_cast<double>(ip.size()) < kMinRespSeconds * sample_rate_hz) {
    throw InvalidInput("impedance record shorter than 30 s");
  }
  check_channel(ip, "ip");
  check_channel(ecg, "ecg");

  const auto taps = static_cast<std::size_t>(std::max(1L, std::lround(config.taps_s * sample_rate_hz)));
  // Adaptation runs on high-passed copies so that respiration, which is far
  // stronger than the artifact, does not drive the weights.
  const auto desired = dsp::zero_phase_highpass(ip, sample_rate_hz, config.adaptation_cutoff_hz);
  const auto ref = dsp::zero_phase_highpass(ecg, sample_rate_hz, config.adaptation_cutoff_hz);

  std::vector<double> weights(taps, 0.0);
  std::vector<double> out(ip.size());
  double energy = 0.0;  // squared norm of the current reference window
  for (std::size_t n = 0; n < ip.size(); ++n) {
    energy += ref[n] * ref[n];
    if (n >= taps) energy -= ref[n - taps] * ref[n - taps];
    if (energy < 0.0) energy = 0.0;
    double estimate = 0.0;
    const std::size_t depth = std::min(taps, n + 1);
    for (std::size_t k = 0; k < depth; ++k) estimate += weights[k] * ref[n - k];
    const double error = desired[n] - estimate;
    out[n] = ip[n] - estimate;
    if (depth == taps && energy > 0.0) {
      const double gain = config.step * error / (energy + 1e-12 * static_cast<double>(taps));
      for (std::size_t k = 0; k < depth; ++k) weights[k] += gain * ref[n - k];
    }
  }
  return out;
}

std::vector<double> remove_cardiac_component(std::span<const double> ip, std::span<const double> ecg,
                                             double sample_rate_hz, const CardiacCancellerConfig& config) {
  auto cleaned = cancel_cardiac_artifact(ip, ecg, sample_rate_hz, config);
  const auto width = static_cast<std::size_t>(std::max(1L, std::lround(config.smoothing_s * sample_rate_hz)));
  return dsp::centered_moving_average(cleaned, width);
}

std::vector<std::size_t> rejected_breaths(std::span<const double> ins_t_s, std::span<const double> ins_v,
                                          const BreathDelimiterConfig& config) {
  std::vector<std::size_t> out;
  const std::size_t n = ins_v.size();
  const std::size_t half = config.running_median_breaths / 2;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n, i + half + 1);
    std::vector<double> local(ins_v.begin() + static_cast<std::ptrdiff_t>(lo),
                              ins_v.begin() + static_cast<std::ptrdiff_t>(hi));
    const double med = dsp::median(std::move(local));
    if (ins_t_s[i] < config.min_ins_t_s || ins_v[i] < config.min_relative_amplitude * med) out.push_back(i);
  }
  return out;
}

BreathSeries delimit_breaths(std::span<const double> ip_clean, double sample_rate_hz,
                             const BreathDelimiterConfig& config) {
  const double fs = sample_rate_hz;
  if (!(fs > 0.0)) throw InvalidInput("sample rate must be positive");
  if (static_cast<double>(ip_clean.size()) < kMinRespSeconds * fs) {
    throw InvalidInput("impedance record shorter than 30 s");
  }
  check_channel(ip_clean, "ip");

  const std::size_t n = ip_clean.size();
  std::vector<double> flow(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      flow[i] = (ip_clean[1] - ip_clean[0]) * fs;
    } else if (i + 1 == n) {
      flow[i] = (ip_clean[i] - ip_clean[i - 1]) * fs;
    } else {
      flow[i] = (ip_clean[i + 1] - ip_clean[i - 1]) * fs / 2.0;
    }
  }
  auto threshold = dsp::rolling_std(flow, static_cast<std::size_t>(std::lround(config.rolling_window_s * fs)));
  for (double& h : threshold) h *= config.hysteresis_fraction;

  auto onsets = segment_phases(flow, threshold);
  auto& insp = onsets.insp;
  auto& exp = onsets.exp;

  // Merge rejected breaths into the surrounding expiration until stable.
  while (insp.size() >= 2) {
    std::vector<double> ins_t, ins_v;
    for (std::size_t i = 0; i + 1 < insp.size(); ++i) {
      ins_t.push_back((exp[i] - insp[i]) / fs);
      ins_v.push_back(interpolate(ip_clean, exp[i]) - interpolate(ip_clean, insp[i]));
    }
    auto drop = rejected_breaths(ins_t, ins_v, config);
    if (drop.empty()) {
      // An expiration spanning a merged breath may end above its start.
      // Absorb the breath that follows it; the final onset has none, so the
      // preceding breath goes instead.
      for (std::size_t i = 0; i + 1 < insp.size() && drop.empty(); ++i) {
        if (interpolate(ip_clean, exp[i]) - interpolate(ip_clean, insp[i + 1]) <= 0.0) {
          drop.push_back(i + 1 < exp.size() ? i + 1 : i);
        }
      }
      if (drop.empty()) break;
    }
    for (auto it = drop.rbegin(); it != drop.rend(); ++it) {
      insp.erase(insp.begin() + static_cast<std::ptrdiff_t>(*it));
      exp.erase(exp.begin() + static_cast<std::ptrdiff_t>(*it));
    }
  }

  BreathSeries out;
  for (double i : insp) out.insp_onsets_s.push_back(i / fs);
  for (double e : exp) out.exp_onsets_s.push_back(e / fs);
  for (std::size_t i = 0; i + 1 < insp.size(); ++i) {
    out.ins_t_s.push_back((exp[i] - insp[i]) / fs);
    out.exp_t_s.push_back((insp[i + 1] - exp[i]) / fs);
    out.ins_v.push_back(interpolate(ip_clean, exp[i]) - interpolate(ip_clean, insp[i]));
    out.exp_v.push_back(interpolate(ip_clean, exp[i]) - interpolate(ip_clean, insp[i + 1]));
    out.i_rr_s.push_back((insp[i + 1] - insp[i]) / fs);
  }
  if (out.complete_breaths() < kMinCompleteBreaths) {
    throw Error("fewer than 3 complete breaths detected");
  }
  return out;
}

}  // namespace cardiocausal
