#include "domsplit/avalanche.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "domsplit/error.hpp"
#include "domsplit/fit.hpp"

namespace domsplit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDriftNoise = 1e-14;

double log_norm(const Mat2C& A) {
  if (A.max_abs() <= tol::kEntryZero) throw Error(ErrorCode::ProductVanished, "pair product vanished");
  return std::log(op_norm(A));
}

// log sigma1(P * B) where P is a scaled product.
double log_norm_times(const Mat2C& left, const ScaledProduct& P) {
  return P.log_scale + log_norm(left * P.core);
}

}  // namespace

ApConditions ap_conditions(const MatrixSequence& seq, double mu) {
  if (!(mu > 1)) throw Error(ErrorCode::Precondition, "mu must exceed 1");
  ApConditions c;
  c.mu = mu;
  const Window& w = seq.window();
  double worst_pair_log = -std::numeric_limits<double>::infinity();
  for (int j = w.lo; j <= w.hi; ++j) {
    const SingularValues sv = singular_values(seq[j]);
    const double g = sv.sigma2 / sv.sigma1;
    if (j == w.lo || g > c.gap_worst) {
      c.gap_worst = g;
      c.gap_j = j;
    }
    if (j + 1 > w.hi) continue;
    double v = std::numeric_limits<double>::infinity();
    const Mat2C pair = seq[j + 1] * seq[j];
    if (pair.max_abs() > tol::kEntryZero)
      v = log_norm(seq[j + 1]) + log_norm(seq[j]) - log_norm(pair);
    if (v > worst_pair_log || j == w.lo) {
      worst_pair_log = v;
      c.pair_j = j;
    }
  }
  c.pair_worst = std::exp(worst_pair_log);
  c.gap_pass = c.gap_worst <= 1.0 / mu;
  c.pair_pass = w.size() < 2 || worst_pair_log <= 0.25 * std::log(mu);
  return c;
}

double telescoping_residual(const MatrixSequence& seq, int j, int n) {
  if (n < 1) throw Error(ErrorCode::Precondition, "telescoping needs n >= 1");
  const double lhs = window_product(seq, j, n).log_sigma1();
  double rhs = 0;
  for (int k = 0; k < n; ++k) rhs += log_norm(seq[j + k]);
  for (int k = 1; k < n; ++k) {
    const ScaledProduct Pk = window_product(seq, j, k);
    rhs += log_norm_times(seq[j + k], Pk) - log_norm(seq[j + k]) - Pk.log_sigma1();
  }
  return std::abs(lhs - rhs);
}

double ap_residual(const MatrixSequence& seq, int j, int n) {
  if (n < 3) throw Error(ErrorCode::Precondition, "residual needs n >= 3, got " + std::to_string(n));
  double v = window_product(seq, j, n).log_sigma1();
  for (int k = 1; k <= n - 2; ++k) v += log_norm(seq[j + k]);
  for (int k = 0; k <= n - 2; ++k) v -= log_norm(seq[j + k + 1] * seq[j + k]);
  return std::abs(v);
}

NormAngleGap norm_angle_gap(const Mat2C& E1, const Mat2C& E2) {
  const Svd2 f1 = svd2(E1);
  const Svd2 f2 = svd2(E2);
  if (f1.degenerate || f2.degenerate) throw Error(ErrorCode::Degenerate, "factor without a contracted direction");
  NormAngleGap g;
  const Mat2C P = E2 * E1;
  g.ratio = (P.max_abs() > tol::kEntryZero ? op_norm(P) : 0.0) / (f2.sigma1 * f1.sigma1);
  g.overlap = std::abs(inner(f2.v.col0(), f1.u.col0()));
  g.distance = dist(project(f2.v.col1()), project(f1.u.col0()));
  g.discrepancy = std::abs(g.ratio - g.overlap);
  g.max_gap_ratio = std::max(f1.sigma2 / f1.sigma1, f2.sigma2 / f2.sigma1);
  return g;
}

DirectionDrift direction_drift(const MatrixSequence& seq, int j, int n_max, double mu) {
  DirectionDrift d;
  const Window& w = seq.window();
  auto drift_chain = [&](int lim, bool forward, std::vector<double>& out) {
    ScaledProduct P;
    P.start = j;
    std::optional<ProjPoint> prev;
    for (int n = 1; n <= lim; ++n) {
      P = forward ? extend_left(P, seq[j + n - 1]) : extend_right(P, seq[j - n]);
      const Svd2 f = svd2(P.core);
      std::optional<ProjPoint> cur;
      if (!f.degenerate) cur = project(forward ? f.v.col1() : f.u.col0());
      if (n >= 2) out.push_back(prev && cur ? dist(*prev, *cur) : kNaN);
      prev = cur;
    }
  };
  drift_chain(std::min(n_max, w.hi - j + 1), true, d.s_drift);
  drift_chain(std::min(n_max, j - w.lo), false, d.u_drift);

  auto rate = [](const std::vector<double>& drift) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < drift.size(); ++i) {
      if (drift[i] > kDriftNoise) {
        xs.push_back(static_cast<double>(i + 2));
        ys.push_back(std::log(drift[i]));
      }
    }
    return fit_line(xs, ys).slope;
  };
  d.s_rate = rate(d.s_drift);
  d.u_rate = rate(d.u_drift);
  d.required_rate = -0.5 * std::log(mu) + 0.1;
  // Too few points above rounding noise means the drift died out immediately.
  auto ok = [&](double r) { return std::isnan(r) || r <= d.required_rate; };
  d.pass = ok(d.s_rate) && ok(d.u_rate);
  return d;
}

ApReport run_avalanche(const MatrixSequence& seq, double mu, int n_max) {
  if (n_max < 3) throw Error(ErrorCode::Precondition, "n_max must be at least 3");
  ApReport r;
  r.mu = mu;
  r.n_max = n_max;
  r.conditions = ap_conditions(seq, mu);
  const Window& w = seq.window();
  const int size = w.size();

  // Prefix sums of log|B(k)| and log|B(k+1) B(k)| make each cell O(1).
  std::vector<double> single(static_cast<std::size_t>(size + 1), 0.0), pair(static_cast<std::size_t>(size), 0.0);
  for (int i = 0; i < size; ++i) single[static_cast<std::size_t>(i + 1)] = single[static_cast<std::size_t>(i)] + log_norm(seq[w.lo + i]);
  for (int i = 0; i + 1 < size; ++i)
    pair[static_cast<std::size_t>(i + 1)] = pair[static_cast<std::size_t>(i)] + log_norm(seq[w.lo + i + 1] * seq[w.lo + i]);
  auto sum_single = [&](int a, int b) { return single[static_cast<std::size_t>(b - w.lo + 1)] - single[static_cast<std::size_t>(a - w.lo)]; };
  auto sum_pair = [&](int a, int b) { return pair[static_cast<std::size_t>(b - w.lo + 1)] - pair[static_cast<std::size_t>(a - w.lo)]; };

  const double scale = std::pow(mu, -0.5);
  r.max_residual_by_n.assign(static_cast<std::size_t>(n_max + 1), kNaN);
  for (int j = w.lo; j <= w.hi; ++j) {
    ScaledProduct P;
    P.start = j;
    for (int n = 1; n <= n_max && j + n - 1 <= w.hi; ++n) {
      P = extend_left(P, seq[j + n - 1]);
      if (n < 3) continue;
      const double res = std::abs(P.log_sigma1() + sum_single(j + 1, j + n - 2) - sum_pair(j, j + n - 2));
      r.cells.push_back({j, n, res, n * scale});
      double& m = r.max_residual_by_n[static_cast<std::size_t>(n)];
      if (std::isnan(m) || res > m) m = res;
      r.C_fit = std::max(r.C_fit, res / (n * scale));
    }
  }
  for (int j = w.lo; j <= w.hi; ++j) {
    const int n = std::min(n_max, w.hi - j + 1);
    r.telescoping_max = std::max(r.telescoping_max, telescoping_residual(seq, j, n));
  }
  std::vector<double> xs, ys;
  for (int n = 3; n <= n_max; ++n) {
    xs.push_back(n);
    ys.push_back(r.max_residual_by_n[static_cast<std::size_t>(n)]);
  }
  r.residual_slope = fit_line(xs, ys).slope;
  r.envelope_holds = r.C_fit <= kApEnvelope;
  return r;
}

}  // namespace domsplit
