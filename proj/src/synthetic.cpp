#include "cardiocausal/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "cardiocausal/param_features.hpp"

namespace cardiocausal::synthetic {

namespace {

struct Wave {
  double amplitude;
  double offset_s;  // relative to the R apex, at R-R = 1 s
  double width_s;
  bool scales_with_rr;
};

constexpr Wave kQrs[] = {
    {-0.12, -0.025, 0.008, false},
    {1.00, 0.000, 0.010, false},
    {-0.25, 0.025, 0.008, false},
};
constexpr Wave kPt[] = {
    {0.12, -0.160, 0.025, true},
    {0.30, 0.280, 0.045, true},
};

void stamp(std::vector<double>& x, double fs, double centre_s, const Wave& w, double amplitude_scale,
           double rr_s) {
  const double offset = w.scales_with_rr ? w.offset_s * std::sqrt(rr_s) : w.offset_s;
  const double mu = centre_s + offset;
  const double reach = 8.0 * w.width_s;
  const auto lo = static_cast<long>(std::max(0.0, std::ceil((mu - reach) * fs)));
  const auto hi = static_cast<long>(std::min(static_cast<double>(x.size()) - 1.0, std::floor((mu + reach) * fs)));
  for (long i = lo; i <= hi; ++i) {
    const double z = (static_cast<double>(i) / fs - mu) / w.width_s;
    x[static_cast<std::size_t>(i)] += amplitude_scale * w.amplitude * std::exp(-0.5 * z * z);
  }
}

}  // namespace

void add_noise(std::vector<double>& x, double snr_db, std::uint64_t seed) {
  double power = 0.0;
  for (double v : x) power += v * v;
  power /= static_cast<double>(x.size());
  const double sd = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sd);
  for (double& v : x) v += noise(rng);
}

Ecg make_ecg(const EcgOptions& o) {
  const auto n = static_cast<std::size_t>(std::llround(o.duration_s * o.sample_rate_hz));
  Ecg out;
  out.samples.assign(n, 0.0);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);

  double t = o.first_beat_s;
  while (t < o.duration_s - 0.5) {
    const double frac = t / o.duration_s;
    const double hr = o.hr_start_bpm + (o.hr_end_bpm - o.hr_start_bpm) * frac;
    double rr = 60.0 / hr + (o.rr_jitter_ms > 0.0 ? o.rr_jitter_ms * jitter(rng) / 1000.0 : 0.0);
    rr = std::max(rr, 0.25);
    out.r_peak_times_s.push_back(t);
    for (const auto& w : kQrs) stamp(out.samples, o.sample_rate_hz, t, w, o.r_amplitude_mv, rr);
    if (o.p_and_t_waves) {
      for (const auto& w : kPt) stamp(out.samples, o.sample_rate_hz, t, w, o.r_amplitude_mv, rr);
    }
    t += rr;
  }
  if (o.snr_db != 0.0) add_noise(out.samples, o.snr_db, o.seed ^ 0x9E3779B97F4A7C15ULL);
  return out;
}

std::vector<double> make_respiration(const RespirationOptions& o) {
  const auto n = static_cast<std::size_t>(std::llround(o.duration_s * o.sample_rate_hz));
  std::vector<double> x(n, 0.0);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double base_period = 60.0 / o.rate_brpm;
  double start = 0.0;
  while (start < o.duration_s) {
    const double period = base_period * std::max(0.3, 1.0 + o.period_jitter * unit(rng));
    const double amp = o.amplitude * std::max(0.05, 1.0 + o.amplitude_jitter * unit(rng));
    const double ins = o.ins_fraction * period;
    const auto lo = static_cast<std::size_t>(std::ceil(start * o.sample_rate_hz));
    const auto hi = std::min(n, static_cast<std::size_t>(std::ceil((start + period) * o.sample_rate_hz)));
    for (std::size_t i = lo; i < hi; ++i) {
      const double tau = static_cast<double>(i) / o.sample_rate_hz - start;
      if (tau < ins) {
        x[i] = amp * 0.5 * (1.0 - std::cos(std::numbers::pi * tau / ins));
      } else {
        x[i] = amp * 0.5 * (1.0 + std::cos(std::numbers::pi * (tau - ins) / (period - ins)));
      }
    }
    start += period;
  }
  return x;
}

SignalRecord make_recording(const std::string& subject_id, Position position, const SubjectProfile& p,
                            double duration_s, double sample_rate_hz, std::uint64_t seed) {
  EcgOptions eo;
  eo.duration_s = duration_s;
  eo.sample_rate_hz = sample_rate_hz;
  eo.hr_start_bpm = eo.hr_end_bpm = p.hr_bpm;
  eo.rr_jitter_ms = p.rr_jitter_ms;
  eo.snr_db = 25.0;
  eo.seed = seed;
  auto ecg = make_ecg(eo);

  RespirationOptions ro;
  ro.duration_s = duration_s;
  ro.sample_rate_hz = sample_rate_hz;
  ro.rate_brpm = p.breath_rate_brpm;
  ro.period_jitter = p.period_jitter;
  ro.amplitude_jitter = p.amplitude_jitter;
  ro.seed = seed + 1;
  auto ip = make_respiration(ro);

  SignalRecord rec;
  rec.subject_id = subject_id;
  rec.position = position;
  rec.sample_rate_hz = sample_rate_hz;
  rec.ecg.resize(ecg.samples.size());
  rec.ip.resize(ip.size());
  for (std::size_t i = 0; i < ip.size(); ++i) {
    rec.ecg[i] = ecg.samples[i] + 0.2;  // electrode offset
    rec.ip[i] = 450.0 + ip[i] + p.cardiac_leak * ecg.samples[i];
  }
  return rec;
}

namespace {

// Standardized linear SEM over the eight free parameters, listed in a
// topological order. Each entry: child, {parent, coefficient}...
struct SemEquation {
  Parameter child;
  std::vector<std::pair<Parameter, double>> parents;
};

const std::vector<SemEquation>& sem() {
  using P = Parameter;
  static const std::vector<SemEquation> eqs = {
      {P::RMSSD, {}},
      {P::RR, {}},
      {P::cInsV, {}},
      {P::cExpV, {{P::cInsV, 0.8}}},
      {P::ciRR, {{P::cInsV, 0.5}, {P::RR, -0.5}}},
      {P::HR, {{P::ciRR, 0.5}, {P::RMSSD, -0.6}}},
      {P::cInsT, {{P::HR, 0.5}}},
      {P::cExpT, {{P::cInsT, 0.7}, {P::cExpV, 0.4}}},
  };
  return eqs;
}

// Noise s.d. per equation such that every variable has unit marginal
// variance, from the implied covariance built up in topological order.
std::vector<double> unit_variance_noise() {
  std::array<std::array<double, kParameterCount>, kParameterCount> cov{};
  std::vector<double> out;
  std::vector<Parameter> done;
  for (const auto& eq : sem()) {
    const auto c = index_of(eq.child);
    double explained = 0.0;
    for (const auto& [a, ca] : eq.parents) {
      for (const auto& [b, cb] : eq.parents) explained += ca * cb * cov[index_of(a)][index_of(b)];
    }
    for (auto k : done) {
      double v = 0.0;
      for (const auto& [a, ca] : eq.parents) v += ca * cov[index_of(a)][index_of(k)];
      cov[c][index_of(k)] = cov[index_of(k)][c] = v;
    }
    cov[c][c] = 1.0;
    done.push_back(eq.child);
    out.push_back(std::sqrt(1.0 - explained));
  }
  return out;
}

struct Scale {
  double mean_supine, mean_standing, sd, floor;
};

Scale scale_of(Parameter p) {
  switch (p) {
    case Parameter::HR: return {60.0, 80.0, 9.0, 30.0};
    case Parameter::RMSSD: return {75.0, 45.0, 20.0, 3.0};
    case Parameter::RR: return {15.0, 13.0, 3.0, 4.0};
    case Parameter::ciRR: return {0.25, 0.20, 0.06, 0.005};
    case Parameter::cInsT: return {0.22, 0.18, 0.05, 0.005};
    case Parameter::cExpT: return {0.28, 0.23, 0.06, 0.005};
    case Parameter::cInsV: return {0.30, 0.24, 0.07, 0.005};
    case Parameter::cExpV: return {0.31, 0.25, 0.07, 0.005};
    default: return {0.0, 0.0, 1.0, 0.0};
  }
}

}  // namespace

CohortTruth cohort_truth() {
  CohortTruth t;
  for (const auto& eq : sem()) {
    for (const auto& [parent, coef] : eq.parents) t.edges.emplace_back(parent, eq.child);
  }
  t.edges.emplace_back(Parameter::RMSSD, Parameter::lnRMSSD);
  for (auto cv : {Parameter::ciRR, Parameter::cInsT, Parameter::cExpT, Parameter::cInsV, Parameter::cExpV}) {
    t.edges.emplace_back(cv, Parameter::BR);
  }
  return t;
}

ParameterTable make_cohort(std::size_t subjects, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  constexpr double kSubjectShare = 0.5;  // exogenous variance shared across positions

  const auto noise_sd = unit_variance_noise();
  ParameterTable table;
  std::vector<std::array<double, kParameterCount>> subject_effect(subjects);
  for (auto& e : subject_effect) {
    for (double& v : e) v = unit(rng);
  }
  for (auto position : {Position::Supine, Position::Standing}) {
    for (std::size_t s = 0; s < subjects; ++s) {
      std::array<double, kParameterCount> z{};
      for (std::size_t k = 0; k < sem().size(); ++k) {
        const auto& eq = sem()[k];
        double signal = 0.0;
        for (const auto& [parent, coef] : eq.parents) signal += coef * z[index_of(parent)];
        const double e = std::sqrt(kSubjectShare) * subject_effect[s][index_of(eq.child)] +
                         std::sqrt(1.0 - kSubjectShare) * unit(rng);
        z[index_of(eq.child)] = signal + noise_sd[k] * e;
      }
      ParamVector pv;
      auto value = [&](Parameter p) {
        const auto sc = scale_of(p);
        const double mu = position == Position::Supine ? sc.mean_supine : sc.mean_standing;
        return std::max(sc.floor, mu + sc.sd * z[index_of(p)]);
      };
      pv.hr_bpm = value(Parameter::HR);
      pv.rmssd_ms = value(Parameter::RMSSD);
      pv.ln_rmssd = std::log(pv.rmssd_ms);
      pv.rr_brpm = value(Parameter::RR);
      pv.ci_rr = value(Parameter::ciRR);
      pv.c_ins_t = value(Parameter::cInsT);
      pv.c_exp_t = value(Parameter::cExpT);
      pv.c_ins_v = value(Parameter::cInsV);
      pv.c_exp_v = value(Parameter::cExpV);
      pv.br_percent = breathing_regularity({pv.ci_rr, pv.c_ins_t, pv.c_exp_t, pv.c_ins_v, pv.c_exp_v});

      char id[24];
      std::snprintf(id, sizeof(id), "s%03zu", s + 1);
      table.add({id, position, pv.values()});
    }
  }
  return table;
}

}  // namespace cardiocausal::synthetic
