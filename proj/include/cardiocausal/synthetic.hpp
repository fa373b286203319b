#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cardiocausal/record_io.hpp"

namespace cardiocausal::synthetic {

struct EcgOptions {
  double duration_s = 360.0;
  double sample_rate_hz = 250.0;
  double hr_start_bpm = 75.0;
  double hr_end_bpm = 75.0;    // linear sweep from start to end
  double rr_jitter_ms = 0.0;   // i.i.d. Gaussian beat-to-beat jitter
  bool p_and_t_waves = true;   // false: QRS complexes only, exactly zero baseline
  double r_amplitude_mv = 1.0;
  double snr_db = 0.0;         // additive white noise; 0 disables it
  double first_beat_s = 0.5;
  std::uint64_t seed = 1;
};

struct Ecg {
  std::vector<double> samples;
  std::vector<double> r_peak_times_s;  // ground-truth R apex times
};

/// Sum-of-Gaussians ECG with P, Q, R, S and T components; the P and T offsets
/// scale with the square root of the current R-R interval.
Ecg make_ecg(const EcgOptions& options);

struct RespirationOptions {
  double duration_s = 360.0;
  double sample_rate_hz = 250.0;
  double rate_brpm = 15.0;
  double amplitude = 1.0;        // peak-to-peak impedance change
  double period_jitter = 0.0;    // relative s.d. of each breath period
  double amplitude_jitter = 0.0; // relative s.d. of each breath amplitude
  double ins_fraction = 0.4;     // share of each breath spent inspiring
  std::uint64_t seed = 1;
};

/// Breath-by-breath impedance waveform: raised-cosine inspiration and
/// expiration half-cycles, each breath starting from the same end-expiratory
/// level.
std::vector<double> make_respiration(const RespirationOptions& options);

/// Adds white Gaussian noise at the requested signal-to-noise ratio (power).
void add_noise(std::vector<double>& x, double snr_db, std::uint64_t seed);

/// Physiological knobs for one simulated recording.
struct SubjectProfile {
  double hr_bpm = 65.0;
  double rr_jitter_ms = 40.0;
  double breath_rate_brpm = 14.0;
  double period_jitter = 0.1;
  double amplitude_jitter = 0.1;
  double cardiac_leak = 0.05;  // scale of ECG copied into the impedance channel
};

SignalRecord make_recording(const std::string& subject_id, Position position, const SubjectProfile& profile,
                            double duration_s, double sample_rate_hz, std::uint64_t seed);

/// Ground truth of the bundled cohort generator.
struct CohortTruth {
  /// Directed edges of the linear SEM between parameters, including the
  /// deterministic links RMSSD -> lnRMSSD and CVs -> BR.
  std::vector<std::pair<Parameter, Parameter>> edges;
};

CohortTruth cohort_truth();

/// `subjects` subjects in both positions drawn from a fixed linear SEM over
/// HR, RMSSD, RR and the five respiratory CVs; lnRMSSD and BR are computed
/// from their definitions. Positions share the graph and differ in means.
ParameterTable make_cohort(std::size_t subjects, std::uint64_t seed);

}  // namespace cardiocausal::synthetic
