#include "cardiocausal/additive_model.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>

#include "cardiocausal/types.hpp"

namespace cardiocausal::gam {

namespace {

constexpr int kDegree = 3;
constexpr double kRidge = 1e-9;

/// Values of the degree-3 B-splines at x (de Boor); writes the four nonzero
/// values into `out` and returns the index of the first one.
int basis_values(const std::vector<double>& t, int k, double x, std::array<double, 4>& out) {
  int s = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  s = std::clamp(s, kDegree, k - 1);
  std::array<double, 4> left{};
  std::array<double, 4> right{};
  out = {1.0, 0.0, 0.0, 0.0};
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = x - t[s + 1 - j];
    right[j] = t[s + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? out[r] / denom : 0.0;
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
  return s - kDegree;
}

Eigen::VectorXd basis_row(const std::vector<double>& t, int k, double x) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(k);
  std::array<double, 4> v{};
  const int first = basis_values(t, k, x, v);
  for (int r = 0; r < 4; ++r) row(first + r) = v[r];
  return row;
}

struct System {
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  std::vector<Eigen::Index> offsets;
  double yty;
  Eigen::Index n;
};

System build(const Eigen::VectorXd& y, const std::vector<const SmoothTerm*>& terms) {
  Eigen::Index cols = 1;
  std::vector<Eigen::Index> offsets;
  for (const auto* term : terms) {
    offsets.push_back(cols);
    cols += term->design.cols();
  }
  Eigen::MatrixXd x(y.size(), cols);
  x.col(0).setOnes();
  for (std::size_t j = 0; j < terms.size(); ++j) {
    x.middleCols(offsets[j], terms[j]->design.cols()) = terms[j]->design;
  }
  return {x.transpose() * x, x.transpose() * y, offsets, y.squaredNorm(), y.size()};
}

struct Solved {
  Eigen::VectorXd beta;
  double rss;
  double edf;
  double gcv;
};

Solved solve(const System& sys, const std::vector<const SmoothTerm*>& terms, const std::vector<double>& lambdas) {
  Eigen::MatrixXd a = sys.xtx;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto m = terms[j]->penalty.rows();
    a.block(sys.offsets[j], sys.offsets[j], m, m) += lambdas[j] * terms[j]->penalty;
  }
  a.diagonal().array() += kRidge * (1.0 + sys.xtx.diagonal().array());
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw InvalidInput("additive model system is not positive definite");
  Solved out;
  out.beta = llt.solve(sys.xty);
  out.rss = std::max(0.0, sys.yty - 2.0 * out.beta.dot(sys.xty) + out.beta.dot(sys.xtx * out.beta));
  out.edf = llt.solve(sys.xtx).trace();
  const double n = static_cast<double>(sys.n);
  const double resid_df = std::max(n - out.edf, 1e-8);
  out.gcv = n * out.rss / (resid_df * resid_df);
  return out;
}

Eigen::VectorXd fitted_values(const Eigen::VectorXd& beta, const std::vector<const SmoothTerm*>& terms,
                              const std::vector<Eigen::Index>& offsets, Eigen::Index n) {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, beta(0));
  for (std::size_t j = 0; j < terms.size(); ++j) {
    f += terms[j]->design * beta.segment(offsets[j], terms[j]->design.cols());
  }
  return f;
}

}  // namespace

SmoothTerm cubic_spline_term(const Eigen::VectorXd& x, int basis_size) {
  if (basis_size < kDegree + 2) throw InvalidInput("spline basis needs at least 5 functions");
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (!(hi > lo)) throw InvalidInput("smooth term covariate is constant");
  const int k = basis_size;
  const int interior = k - kDegree - 1;
  std::vector<double> t;
  for (int i = 0; i <= kDegree; ++i) t.push_back(lo);
  for (int i = 1; i <= interior; ++i) t.push_back(lo + (hi - lo) * i / (interior + 1));
  for (int i = 0; i <= kDegree; ++i) t.push_back(hi);

  Eigen::MatrixXd b(x.size(), k);
  for (Eigen::Index i = 0; i < x.size(); ++i) b.row(i) = basis_row(t, k, x(i)).transpose();

  // Exact penalty: B'' is linear on each knot interval, so two-point
  // Gauss-Legendre is exact; B'' itself comes from a central difference,
  // which is exact for a cubic piece.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
  const double g = 1.0 / std::sqrt(3.0);
  for (int span = kDegree; span < k; ++span) {
    const double a = t[span];
    const double c = t[span + 1];
    if (!(c > a)) continue;
    const double mid = 0.5 * (a + c);
    const double half = 0.5 * (c - a);
    const double h = 1e-3 * (c - a);
    for (double node : {-g, g}) {
      const double xq = mid + half * node;
      const Eigen::VectorXd d2 =
          (basis_row(t, k, xq + h) - 2.0 * basis_row(t, k, xq) + basis_row(t, k, xq - h)) / (h * h);
      s += half * d2 * d2.transpose();
    }
  }

  const Eigen::VectorXd c = b.colwise().sum().transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd z = q.rightCols(k - 1);

  SmoothTerm term;
  term.design = b * z;
  term.penalty = z.transpose() * s * z;
  const double scale = (term.design.transpose() * term.design).norm() / term.penalty.norm();
  term.penalty *= scale;
  return term;
}

AdditiveFit fit_additive(const Eigen::VectorXd& y, const std::vector<const SmoothTerm*>& terms,
                         const std::optional<std::vector<double>>& lambdas) {
  for (const auto* term : terms) {
    if (term->design.rows() != y.size()) throw InvalidInput("smooth term length does not match response");
  }
  const System sys = build(y, terms);
  std::vector<double> lam;
  if (lambdas) {
    if (lambdas->size() != terms.size()) throw InvalidInput("one smoothing parameter per term is required");
    lam = *lambdas;
  } else {
    lam.assign(terms.size(), 1.0);
    double best = solve(sys, terms, lam).gcv;
    auto sweep = [&](double step, double lo_exp, double hi_exp, bool around_current) {
      for (std::size_t j = 0; j < terms.size(); ++j) {
        const double centre = std::log10(lam[j]);
        const double from = around_current ? centre - step : lo_exp;
        const double to = around_current ? centre + step : hi_exp;
        const double keep = lam[j];
        double best_lambda = keep;
        for (double e = from; e <= to + 1e-9; e += step) {
          lam[j] = std::pow(10.0, e);
          const double v = solve(sys, terms, lam).gcv;
          if (v < best) {
            best = v;
            best_lambda = lam[j];
          }
        }
        lam[j] = best_lambda;
      }
    };
    sweep(1.0, -6.0, 6.0, false);
    sweep(1.0, -6.0, 6.0, false);
    sweep(0.5, 0.0, 0.0, true);
    sweep(0.25, 0.0, 0.0, true);
  }
  const Solved sol = solve(sys, terms, lam);
  AdditiveFit fit;
  fit.fitted = fitted_values(sol.beta, terms, sys.offsets, y.size());
  fit.lambdas = lam;
  fit.rss = sol.rss;
  fit.edf = sol.edf;
  fit.gcv = sol.gcv;
  return fit;
}

std::vector<double> term_p_values(const Eigen::VectorXd& y, const std::vector<const SmoothTerm*>& terms,
                                  const AdditiveFit& full) {
  const double n = static_cast<double>(y.size());
  std::vector<double> out;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    std::vector<const SmoothTerm*> reduced;
    std::vector<double> lam;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i == j) continue;
      reduced.push_back(terms[i]);
      lam.push_back(full.lambdas[i]);
    }
    const auto r = fit_additive(y, reduced, lam);
    const double df1 = full.edf - r.edf;
    const double df2 = n - full.edf;
    if (!(df1 > 1e-6) || !(df2 > 0.0) || !(r.rss > full.rss) || !(full.rss > 0.0)) {
      out.push_back(full.rss == 0.0 && r.rss > 0.0 ? 0.0 : 1.0);
      continue;
    }
    const double f = ((r.rss - full.rss) / df1) / (full.rss / df2);
    boost::math::fisher_f dist(df1, df2);
    out.push_back(boost::math::cdf(boost::math::complement(dist, f)));
  }
  return out;
}

}  // namespace cardiocausal::gam
