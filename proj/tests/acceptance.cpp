// Acceptance report: one PASS / FAIL / SKIP line per criterion. Exits 0 when
// every criterion ran to completion, 1 when any of them threw.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cardiocausal/association.hpp"
#include "cardiocausal/cardio_signals.hpp"
#include "cardiocausal/hypothesis_tests.hpp"
#include "cardiocausal/mediation.hpp"
#include "cardiocausal/param_features.hpp"
#include "cardiocausal/pipeline.hpp"
#include "cardiocausal/record_io.hpp"
#include "cardiocausal/resp_signals.hpp"
#include "cardiocausal/structure_search.hpp"
#include "cardiocausal/synthetic.hpp"
#include "oracles.hpp"
#include "sem_support.hpp"

using namespace cardiocausal;

namespace {

struct Outcome {
  enum class Status { Pass, Fail, Skip } status;
  std::string detail;
};

class Report {
 public:
  Report& check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    parts_.push_back((ok ? "" : "!") + what);
    return *this;
  }

  Outcome outcome() const {
    std::string joined;
    for (const auto& p : parts_) joined += (joined.empty() ? "" : "; ") + p;
    return {ok_ ? Outcome::Status::Pass : Outcome::Status::Fail, joined};
  }

 private:
  bool ok_ = true;
  std::vector<std::string> parts_;
};

template <typename... Args>
std::string fmt(Args&&... args) {
  std::ostringstream os;
  os << std::setprecision(6);
  (os << ... << args);
  return os.str();
}

Outcome breathing_regularity_suite() {
  Report r;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  bool in_range = true;
  for (int i = 0; i < 10000; ++i) {
    const CvSet cv{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double br = breathing_regularity(cv);
    in_range = in_range && br >= 0.0 && br <= 100.0;
  }
  r.check(in_range, "BR in [0,100] on 10^4 random CV vectors");
  const double zero = breathing_regularity(CvSet{0.0, 0.0, 0.0, 0.0, 0.0});
  r.check(zero == 100.0, fmt("BR(0)=", zero));
  const double tenth = breathing_regularity(CvSet{0.1, 0.1, 0.1, 0.1, 0.1});
  const double direct = 100.0 - 20.0 * 5.0 * std::tanh(0.1);
  r.check(std::abs(tenth - direct) <= 1e-12, fmt("BR(0.1)=", std::setprecision(9), tenth, " direct ", direct));
  r.check(std::abs(tenth - 90.0335) <= 1e-4, fmt("target 90.0335 +-1e-4, off by ", std::abs(tenth - 90.0335)));
  return r.outcome();
}

Outcome bayes_collapse() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(50, 500);
  std::uniform_real_distribution<double> rho(-0.95, 0.95);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    const double c = rho(rng);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = c * x[i] + std::sqrt(1.0 - c * c) * g(rng);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    const double pearson = sxy / std::sqrt(sxx * syy);
    worst = std::max(worst, std::abs(bayes_correlation(x, y).r - pearson));
  }
  return Report().check(worst <= 1e-9, fmt("max |r - pearson| = ", worst, " over 100 datasets")).outcome();
}

Outcome generalized_asymmetry() {
  Report r;
  std::mt19937_64 rng(2000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(2000), y(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = u(rng);
    y[i] = x[i] * x[i];
  }
  const auto q = generalized_corr_pair(x, y);
  r.check(q.gmc_y_given_x >= 0.9, fmt("gmc_y|x=", q.gmc_y_given_x));
  r.check(std::abs(q.r_pearson) <= 0.1, fmt("r=", q.r_pearson));
  r.check(q.direction == Direction::XcausesY, "direction=" + to_string(q.direction));

  std::mt19937_64 null_rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  int directed = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(100), b(100);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = g(null_rng);
      b[i] = g(null_rng);
    }
    directed += generalized_corr_pair(a, b).direction != Direction::Undecided;
  }
  r.check(directed <= 20, fmt("false-direction rate ", directed / 200.0));
  return r.outcome();
}

Outcome structure_oracle() {
  std::mt19937_64 rng(1);
  int hc = 0, tabu = 0, fges_hits = 0;
  for (int t = 0; t < 100; ++t) {
    const auto sem = testsupport::random_sem(4, 0.5, 0.5, 2.0, rng);
    const auto d = testsupport::sample(sem, 2000, rng);
    const auto oracle = enumerate_best_dag(d);
    hc += std::abs(bic_score(d, hill_climb(d, {})) - oracle.best_score) <= 1e-6;
    tabu += std::abs(bic_score(d, tabu_search(d, {})) - oracle.best_score) <= 1e-6;
    fges_hits += fges(d, {}) == oracle.best_cpdag;
  }
  Report r;
  r.check(hc >= 95, fmt("hill climbing ", hc, "/100"));
  r.check(tabu >= 95, fmt("tabu ", tabu, "/100"));
  r.check(fges_hits >= 90, fmt("fges ", fges_hits, "/100"));
  return r.outcome();
}

Outcome collider_identification() {
  Report r;
  const auto d = testsupport::collider_data(5000, 1);
  const std::vector<Edge> expected{{0, 1}, {2, 1}};
  auto describe = [](const std::vector<Edge>& edges) {
    std::string s;
    for (const auto& e : edges) s += fmt(s.empty() ? "" : ",", e.from, "->", e.to);
    return "{" + s + "}";
  };
  const auto hc = hill_climb(d, {}).edges();
  r.check(hc == expected, "hill climbing " + describe(hc));
  const auto tabu = tabu_search(d, {}).edges();
  r.check(tabu == expected, "tabu " + describe(tabu));
  const auto f = fges(d, {});
  r.check(f.directed_edges() == expected && f.undirected_edges().empty(), "fges " + describe(f.directed_edges()));

  const auto chain = fges(testsupport::chain_data(5000, 1), {});
  const std::vector<Edge> chain_skeleton{{0, 1}, {1, 2}};
  r.check(chain.directed_edges().empty() && chain.undirected_edges() == chain_skeleton, "fges chain undirected");
  return r.outcome();
}

Outcome cam_benchmark() {
  int sine_hits = 0, empty = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd d(500, 2);
    for (Eigen::Index i = 0; i < 500; ++i) {
      d(i, 0) = g(rng);
      d(i, 1) = std::sin(2.0 * d(i, 0)) + 0.2 * g(rng);
    }
    sine_hits += cam_learn(d, {}).edges() == std::vector<Edge>{{0, 1}};
    empty += cam_learn(testsupport::independent_data(500, 2, seed), {}).edge_count() == 0;
  }
  Report r;
  r.check(sine_hits >= 18, fmt("sine X->Y ", sine_hits, "/20"));
  r.check(empty >= 18, fmt("independent empty ", empty, "/20"));
  return r.outcome();
}

Outcome signal_front_end() {
  Report r;
  synthetic::EcgOptions o;
  o.hr_start_bpm = 60.0;
  o.hr_end_bpm = 180.0;
  o.snr_db = 10.0;
  o.seed = 7;
  const auto ecg = synthetic::make_ecg(o);
  const auto beats = detect_r_peaks(detrend_ecg(ecg.samples, o.sample_rate_hz), o.sample_rate_hz);
  const auto m = oracles::match(ecg.r_peak_times_s, beats.r_peak_times_s, 0.05);
  r.check(m.sensitivity() >= 0.99, fmt("sensitivity ", m.sensitivity()));
  r.check(m.ppv() >= 0.99, fmt("PPV ", m.ppv()));
  r.check(m.max_error_s <= 0.008 + 1e-9, fmt("max timing error ", m.max_error_s * 1000.0, " ms"));

  const double fs = 250.0;
  std::vector<double> ip(static_cast<std::size_t>(360.0 * fs));
  for (std::size_t i = 0; i < ip.size(); ++i) ip[i] = std::sin(2.0 * std::numbers::pi * 0.25 * static_cast<double>(i) / fs);
  const auto b = delimit_breaths(ip, fs);
  const auto count = static_cast<double>(b.complete_breaths());
  r.check(std::abs(count - 89.0) <= 1.0, fmt("breaths ", count));
  double worst = 0.0;
  for (double irr : b.i_rr_s) worst = std::max(worst, std::abs(irr - 4.0));
  r.check(worst <= 0.040, fmt("max iRR error ", worst * 1000.0, " ms"));
  return r.outcome();
}

Outcome statistics_oracles() {
  Report r;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> size(1, 12);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(-4, 4);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> d(static_cast<std::size_t>(size(rng)));
    const bool ties = t % 2 == 1;
    for (double& v : d) v = ties ? coarse(rng) : g(rng) + 0.3;
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) d[0] = 1.0;
    double v_expected = 0.0;
    const double p_expected = oracles::enumerate_signed_rank_p(d, &v_expected);
    const auto w = stats::wilcoxon_signed_rank(d);
    if (std::abs(w.statistic - v_expected) > 1e-9 || std::abs(w.p_value - p_expected) > 1e-9) ++mismatches;
  }
  r.check(mismatches == 0, fmt("signed-rank mismatches ", mismatches, "/1000"));

  std::mt19937_64 med_rng(77);
  std::uniform_real_distribution<double> coef(-0.6, 0.6);
  int agree = 0;
  for (int k = 0; k < 50; ++k) {
    const double a = coef(med_rng);
    const double b = coef(med_rng);
    const auto t = oracles::simulate_mediation(100, a, b, 0.3, 1.0, med_rng);
    const auto f = mediation_fit(t.x, t.m, t.y);
    agree += (oracles::bootstrap_indirect_p(t, 2000, med_rng) < 0.05) == (f.sobel_p < 0.05);
  }
  r.check(agree >= 45, fmt("Sobel/bootstrap agreement ", agree, "/50"));

  std::mt19937_64 scale_rng(4);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto t = oracles::simulate_mediation(60, 0.4, 0.6, 0.2, 1.0, scale_rng);
    const auto f = mediation_fit(t.x, t.m, t.y);
    for (double c : {0.001, 0.37, 12.5, 4000.0}) {
      auto scaled = [c](std::vector<double> v) {
        for (double& e : v) e *= c;
        return v;
      };
      for (const auto& h : {mediation_fit(scaled(t.x), t.m, t.y), mediation_fit(t.x, scaled(t.m), t.y),
                            mediation_fit(t.x, t.m, scaled(t.y))}) {
        worst = std::max({worst, std::abs(h.sobel_z - f.sobel_z) / (1.0 + std::abs(f.sobel_z)),
                          std::abs(h.sobel_p - f.sobel_p)});
      }
    }
  }
  r.check(worst <= 1e-9, fmt("Sobel scale deviation ", worst));
  return r.outcome();
}

Outcome synthetic_cohort() {
  const auto table = synthetic::make_cohort(100, 1);
  RunConfig c;
  c.search.seed = 1;
  const auto report = run_pipeline(c, table);
  const auto rerun = run_pipeline(c, table);
  std::set<std::pair<std::size_t, std::size_t>> truth;
  for (auto [a, b] : synthetic::cohort_truth().edges) {
    if (is_masked_pair(a, b)) continue;
    truth.insert({std::min(index_of(a), index_of(b)), std::max(index_of(a), index_of(b))});
  }
  Report r;
  const std::size_t majority = c.methods.size() / 2 + 1;
  for (const auto& pr : report.positions) {
    const auto sk = consensus_skeleton(pr.consensus, majority);
    std::size_t tp = 0;
    for (const auto& e : sk) tp += truth.count({e.from, e.to});
    const double precision = sk.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(sk.size());
    const double recall = static_cast<double>(tp) / static_cast<double>(truth.size());
    const double f1 = tp == 0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    r.check(f1 >= 0.8, fmt(name_of(pr.position), " F1 ", f1));
  }
  r.check(to_json(report).dump(2) == to_json(rerun).dump(2), "byte-identical rerun");
  return r.outcome();
}

struct ExpectedR {
  Parameter a;
  Parameter b;
  double r;
};

struct ExpectedSobel {
  Position position;
  Parameter x, m, y;
  double p;
};

Outcome cohort_reproduction(const std::filesystem::path& csv) {
  using P = Parameter;
  const auto table = load_parameter_table(csv);
  Report r;

  const std::vector<ExpectedR> supine_r{
      {P::HR, P::RMSSD, -0.36},    {P::HR, P::lnRMSSD, -0.41},   {P::RMSSD, P::lnRMSSD, 0.95},
      {P::RR, P::ciRR, -0.42},     {P::RR, P::cInsT, -0.14},     {P::RR, P::cExpT, -0.22},
      {P::RR, P::BR, 0.16},        {P::ciRR, P::cInsT, 0.69},    {P::ciRR, P::cExpT, 0.73},
      {P::ciRR, P::cInsV, 0.62},   {P::ciRR, P::cExpV, 0.62},    {P::ciRR, P::BR, -0.81},
      {P::cInsT, P::cExpT, 0.70},  {P::cInsT, P::cInsV, 0.63},   {P::cInsT, P::cExpV, 0.63},
      {P::cInsT, P::BR, -0.84},    {P::cExpT, P::cInsV, 0.62},   {P::cExpT, P::cExpV, 0.61},
      {P::cExpT, P::BR, -0.84},    {P::cInsV, P::cExpV, 0.96},   {P::cInsV, P::BR, -0.91},
      {P::cExpV, P::BR, -0.91},
  };
  int r_ok = 0;
  double worst_r = 0.0;
  for (const auto& e : supine_r) {
    const double got = bayes_correlation(table.column(e.a, Position::Supine), table.column(e.b, Position::Supine)).r;
    const double diff = std::abs(got - e.r);
    worst_r = std::max(worst_r, diff);
    r_ok += (got > 0) == (e.r > 0) && diff <= 0.02;
  }
  r.check(r_ok == static_cast<int>(supine_r.size()),
          fmt("supine correlations ", r_ok, "/", supine_r.size(), ", max |dr| ", worst_r));

  const std::vector<ExpectedSobel> sobel{
      {Position::Supine, P::RMSSD, P::HR, P::cInsT, 0.073},
      {Position::Supine, P::HR, P::cInsT, P::cExpT, 0.086},
      {Position::Supine, P::HR, P::cInsT, P::cInsV, 0.088},
      {Position::Standing, P::cInsT, P::ciRR, P::HR, 0.105},
      {Position::Standing, P::cInsV, P::ciRR, P::HR, 0.058},
  };
  int s_ok = 0;
  double worst_p = 0.0;
  for (const auto& s : sobel) {
    const auto f = mediation_fit(table.column(s.x, s.position), table.column(s.m, s.position),
                                 table.column(s.y, s.position));
    const double diff = std::abs(f.sobel_p - s.p);
    worst_p = std::max(worst_p, diff);
    s_ok += diff <= 0.005;
  }
  r.check(s_ok == static_cast<int>(sobel.size()), fmt("Sobel p ", s_ok, "/", sobel.size(), ", max |dp| ", worst_p));

  // Subjects present in both positions, in supine order.
  std::map<std::string, ParamValues> standing;
  for (const auto& row : table.rows_for(Position::Standing)) standing[row.subject_id] = row.values;
  int significant = 0;
  for (auto p : kAllParameters) {
    std::vector<double> a, b;
    for (const auto& row : table.rows_for(Position::Supine)) {
      auto it = standing.find(row.subject_id);
      if (it == standing.end()) continue;
      a.push_back(row[p]);
      b.push_back(it->second[index_of(p)]);
    }
    significant += paired_compare(a, b, p).p_value < 0.05;
  }
  r.check(significant == static_cast<int>(kParameterCount), fmt("positions differ ", significant, "/10"));
  return r.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, breathing_regularity_suite},
      {2, bayes_collapse},
      {3, generalized_asymmetry},
      {4, structure_oracle},
      {5, collider_identification},
      {6, cam_benchmark},
      {7, signal_front_end},
      {8, statistics_oracles},
      {9, synthetic_cohort},
      {10,
       [] {
         const char* csv = std::getenv("CARDIOCAUSAL_COHORT_CSV");
         if (csv == nullptr || *csv == '\0') return Outcome{Outcome::Status::Skip, "CARDIOCAUSAL_COHORT_CSV not set"};
         return cohort_reproduction(csv);
       }},
  };
  int crashed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Outcome::Status::Fail, std::string("exception: ") + e.what()};
      ++crashed;
    }
    const char* label = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Fail ? "FAIL" : "SKIP";
    std::cout << "criterion " << id << ": " << label << " - " << o.detail << std::endl;
  }
  return crashed == 0 ? 0 : 1;
}
