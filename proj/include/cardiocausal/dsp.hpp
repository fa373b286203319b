#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cardiocausal::dsp {

/// Running median over a centered window of `width` samples (odd). Near the
/// edges the window shrinks to the samples that exist.
std::vector<double> median_filter(std::span<const double> x, std::size_t width);

/// Causal moving average of length `width` with zero initial state.
std::vector<double> causal_boxcar(std::span<const double> x, std::size_t width);

/// Centered moving average of length `width`; samples beyond the ends are
/// mirrored (x[-1] = x[1]). For even widths the window is [i - w/2, i + w/2 - 1].
std::vector<double> centered_moving_average(std::span<const double> x, std::size_t width);

/// Standard deviation over a centered window of `width` samples, shrinking at
/// the edges.
std::vector<double> rolling_std(std::span<const double> x, std::size_t width);

/// Fourth-order Butterworth high-pass run forward and backward (zero phase,
/// squared magnitude response). Ends are padded by odd reflection.
std::vector<double> zero_phase_highpass(std::span<const double> x, double sample_rate_hz, double cutoff_hz);

double mean(std::span<const double> x);

/// Population (divide-by-n) variance.
double population_variance(std::span<const double> x);

double median(std::vector<double> x);

/// Root mean square of x.
double rms(std::span<const double> x);

}  // namespace cardiocausal::dsp
