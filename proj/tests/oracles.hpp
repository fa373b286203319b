#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cardiocausal/mediation.hpp"

namespace oracles {

struct MatchStats {
  std::size_t true_positives = 0;
  std::size_t detected = 0;
  std::size_t truth = 0;
  double max_error_s = 0.0;
  double sensitivity() const { return static_cast<double>(true_positives) / static_cast<double>(truth); }
  double ppv() const { return static_cast<double>(true_positives) / static_cast<double>(detected); }
};

/// Greedy one-to-one matching of detections to true beat times within
/// +-tolerance.
inline MatchStats match(const std::vector<double>& truth, const std::vector<double>& detected, double tolerance_s) {
  MatchStats m;
  m.truth = truth.size();
  m.detected = detected.size();
  std::size_t j = 0;
  for (double t : truth) {
    while (j < detected.size() && detected[j] < t - tolerance_s) ++j;
    if (j < detected.size() && std::abs(detected[j] - t) <= tolerance_s) {
      ++m.true_positives;
      m.max_error_s = std::max(m.max_error_s, std::abs(detected[j] - t));
      ++j;
    }
  }
  return m;
}

/// Two-sided p of the signed-rank statistic by enumerating all 2^n sign
/// assignments of the (average) ranks.
inline double enumerate_signed_rank_p(const std::vector<double>& d, double* v_out) {
  std::vector<double> nz;
  for (double v : d) {
    if (v != 0.0) nz.push_back(v);
  }
  const std::size_t n = nz.size();
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(nz[j]) < std::abs(nz[i])) below += 1.0;
      if (std::abs(nz[j]) == std::abs(nz[i])) equal += 1.0;
    }
    ranks[i] = below + (equal + 1.0) / 2.0;
  }
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (nz[i] > 0) v += ranks[i];
  }
  *v_out = v;
  std::size_t le = 0, ge = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) s += ranks[i];
    }
    if (s <= v + 1e-9) ++le;
    if (s >= v - 1e-9) ++ge;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / std::ldexp(1.0, static_cast<int>(n)));
}

struct MediationData {
  std::vector<double> x, m, y;
};

inline MediationData simulate_mediation(std::size_t n, double a, double b, double direct, double noise,
                                        std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MediationData t;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g(rng);
    const double m = a * x + noise * g(rng);
    t.x.push_back(x);
    t.m.push_back(m);
    t.y.push_back(b * m + direct * x + noise * g(rng));
  }
  return t;
}

/// Percentile-bootstrap two-sided p-value of the indirect effect a * b.
inline double bootstrap_indirect_p(const MediationData& t, int resamples, std::mt19937_64& rng) {
  const auto n = t.x.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> bx(n), bm(n), by(n);
  int le = 0;
  int ge = 0;
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = pick(rng);
      bx[i] = t.x[k];
      bm[i] = t.m[k];
      by[i] = t.y[k];
    }
    const double ab = cardiocausal::mediation_fit(bx, bm, by).indirect_effect;
    le += ab <= 0.0;
    ge += ab >= 0.0;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / static_cast<double>(resamples));
}

}  // namespace oracles
