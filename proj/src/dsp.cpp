#include "cardiocausal/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cardiocausal::dsp {

std::vector<double> median_filter(std::span<const double> x, std::size_t width) {
  if (width == 0 || width % 2 == 0) throw std::invalid_argument("median width must be odd");
  const std::size_t n = x.size();
  const std::size_t half = width / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  buf.reserve(width);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n, i + half + 1);
    buf.assign(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    if (buf.size() % 2 == 1) {
      out[i] = *mid;
    } else {
      out[i] = 0.5 * (*mid + *std::max_element(buf.begin(), mid));
    }
  }
  return out;
}

std::vector<double> causal_boxcar(std::span<const double> x, std::size_t width) {
  if (width == 0) throw std::invalid_argument("boxcar width must be positive");
  std::vector<double> out(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i];
    if (i >= width) acc -= x[i - width];
    out[i] = acc / static_cast<double>(width);
  }
  return out;
}

std::vector<double> centered_moving_average(std::span<const double> x, std::size_t width) {
  if (width == 0) throw std::invalid_argument("window width must be positive");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (n == 0) return {};
  auto reflect = [n](std::ptrdiff_t k) {
    if (n == 1) return std::ptrdiff_t{0};
    const std::ptrdiff_t period = 2 * (n - 1);
    k %= period;
    if (k < 0) k += period;
    return k < n ? k : period - k;
  };
  const auto before = static_cast<std::ptrdiff_t>(width / 2);
  const auto after = static_cast<std::ptrdiff_t>(width) - before - 1;
  std::vector<double> out(x.size());
  double acc = 0.0;
  for (std::ptrdiff_t k = -before; k <= after; ++k) acc += x[static_cast<std::size_t>(reflect(k))];
  out[0] = acc / static_cast<double>(width);
  for (std::ptrdiff_t i = 1; i < n; ++i) {
    acc += x[static_cast<std::size_t>(reflect(i + after))];
    acc -= x[static_cast<std::size_t>(reflect(i - before - 1))];
    out[static_cast<std::size_t>(i)] = acc / static_cast<double>(width);
  }
  return out;
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;

  void run(std::vector<double>& x) const {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
      const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1;
      x1 = v;
      y2 = y1;
      y1 = y;
      v = y;
    }
  }
};

// Bilinear-transform high-pass section with quality factor q.
Biquad highpass_section(double fs, double fc, double q) {
  const double w0 = 2.0 * std::numbers::pi * fc / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  return {(1.0 + c) / 2.0 / a0, -(1.0 + c) / a0, (1.0 + c) / 2.0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
}

}  // namespace

std::vector<double> zero_phase_highpass(std::span<const double> x, double sample_rate_hz, double cutoff_hz) {
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument("cutoff must lie between 0 and Nyquist");
  }
  const std::size_t n = x.size();
  if (n < 2) return std::vector<double>(x.begin(), x.end());
  const std::size_t pad = std::min(n - 1, static_cast<std::size_t>(std::ceil(6.0 * sample_rate_hz / cutoff_hz)));
  std::vector<double> y;
  y.reserve(n + 2 * pad);
  for (std::size_t k = pad; k >= 1; --k) y.push_back(2.0 * x[0] - x[k]);
  y.insert(y.end(), x.begin(), x.end());
  for (std::size_t k = 1; k <= pad; ++k) y.push_back(2.0 * x[n - 1] - x[n - 1 - k]);

  // Butterworth pole pairs for order 4.
  const Biquad sections[] = {highpass_section(sample_rate_hz, cutoff_hz, 0.54119610014619698),
                             highpass_section(sample_rate_hz, cutoff_hz, 1.3065629648763766)};
  // The response to a constant is zero, so shifting each pass to start at
  // zero only removes the start-up transient.
  auto pass = [&] {
    const double first = y.front();
    for (double& v : y) v -= first;
    for (const auto& s : sections) s.run(y);
    std::reverse(y.begin(), y.end());
  };
  pass();
  pass();
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::vector<double> rolling_std(std::span<const double> x, std::size_t width) {
  const std::size_t n = x.size();
  const std::size_t half = width / 2;
  // Prefix sums of the mean-removed signal keep the variance subtraction well conditioned.
  const double m = mean(x);
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - m;
    s1[i + 1] = s1[i] + d;
    s2[i + 1] = s2[i] + d * d;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n, i + half + 1);
    double cnt = static_cast<double>(hi - lo);
    double mu = (s1[hi] - s1[lo]) / cnt;
    double var = (s2[hi] - s2[lo]) / cnt - mu * mu;
    out[i] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return out;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double population_variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of empty sequence");
  auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  double hi = *mid;
  if (x.size() % 2 == 1) return hi;
  double lo = *std::max_element(x.begin(), mid);
  return 0.5 * (lo + hi);
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace cardiocausal::dsp
