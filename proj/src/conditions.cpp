#include "domsplit/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "domsplit/error.hpp"
#include "domsplit/fit.hpp"

namespace domsplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log sigma1 and log sigma2 of B_n(j) for every j in the window and n up to n_top.
class ProductTable {
 public:
  ProductTable(const MatrixSequence& seq, int n_top) : w_(seq.window()) {
    const int size = w_.size();
    s1_.resize(static_cast<std::size_t>(size));
    s2_.resize(static_cast<std::size_t>(size));
    for (int j = w_.lo; j <= w_.hi; ++j) {
      const int len = std::min(n_top, w_.hi - j + 1);
      auto& a = s1_[static_cast<std::size_t>(j - w_.lo)];
      auto& b = s2_[static_cast<std::size_t>(j - w_.lo)];
      a.reserve(static_cast<std::size_t>(len + 1));
      b.reserve(static_cast<std::size_t>(len + 1));
      ScaledProduct P;
      P.start = j;
      a.push_back(0.0);
      b.push_back(0.0);
      for (int n = 1; n <= len; ++n) {
        P = extend_left(P, seq[j + n - 1]);
        a.push_back(P.log_sigma1());
        b.push_back(std::min(P.log_sigma2(), P.log_sigma1()));
      }
    }
  }

  double log_s1(int j, int n) const { return s1_[static_cast<std::size_t>(j - w_.lo)][static_cast<std::size_t>(n)]; }
  double log_s2(int j, int n) const { return s2_[static_cast<std::size_t>(j - w_.lo)][static_cast<std::size_t>(n)]; }

 private:
  Window w_;
  std::vector<std::vector<double>> s1_;
  std::vector<std::vector<double>> s2_;
};

void require_length(const MatrixSequence& seq, int needed, const char* what) {
  if (seq.window().size() < needed) {
    std::ostringstream msg;
    msg << what << " needs a window of at least " << needed << " entries, got " << seq.window().size();
    throw Error(ErrorCode::WindowExceeded, msg.str());
  }
}

// Fills the fit fields of r from r.series over [n_lo, n_hi].
void fit_series(RateFit& r, int n_lo, int n_hi) {
  r.n_lo = n_lo;
  r.n_hi = n_hi;
  auto fit_range = [&](int a, int b) {
    std::vector<double> xs, ys;
    bool all_zero = a <= b;
    for (int n = a; n <= b; ++n) {
      const double y = r.series[static_cast<std::size_t>(n)];
      xs.push_back(n);
      ys.push_back(y);
      if (y != -kInf) all_zero = false;
    }
    LineFit f = fit_line(xs, ys);
    // Every ratio exactly zero: faster than any exponential.
    if (all_zero) {
      f.slope = -kInf;
      f.intercept = -kInf;
    }
    return f;
  };
  const LineFit full = fit_range(n_lo, n_hi);
  const LineFit tail = fit_range(n_lo + (n_hi - n_lo) / 2, n_hi);
  r.rate = full.slope;
  r.intercept = full.intercept;
  r.residual_max = full.residual_max;
  r.tail_rate = tail.slope;
  r.log_C = -kInf;
  for (std::size_t n = 0; n < r.series.size(); ++n) {
    const double y = r.series[n];
    if (!std::isfinite(y)) continue;
    const double shifted = std::isinf(r.rate) ? y : y - r.rate * static_cast<double>(n);
    r.log_C = std::max(r.log_C, shifted);
  }
}

// Exponential rate at least `threshold`, holding up over the upper half of the range.
bool stable_rate_at_least(double rate, double tail, double threshold, double stability) {
  if (std::isnan(rate) || std::isnan(tail)) return false;
  if (rate == kInf && tail == kInf) return true;
  return rate > threshold && tail > threshold && tail >= stability * rate;
}

}  // namespace

RateFit svg_profile(const MatrixSequence& seq, const ConditionParams& params) {
  const int n_max = params.n_max;
  require_length(seq, n_max + 1, "singular value gap profile");
  const Window& w = seq.window();
  const ProductTable T(seq, n_max + 1);
  RateFit r;
  r.series.assign(static_cast<std::size_t>(n_max + 1), -kInf);
  r.extremal_j.assign(static_cast<std::size_t>(n_max + 1), w.lo);
  for (int n = 0; n <= n_max; ++n) {
    for (int j = w.lo; j + n <= w.hi; ++j) {
      const double den = T.log_s1(j, n + 1);
      // B_0(j+1) is the identity even past the window edge.
      const double shifted = n == 0 ? 0.0 : T.log_s2(j + 1, n);
      const double v = std::max(T.log_s2(j, n), shifted) - den;
      r.table.push_back({j, n, v});
      if (v > r.series[static_cast<std::size_t>(n)]) {
        r.series[static_cast<std::size_t>(n)] = v;
        r.extremal_j[static_cast<std::size_t>(n)] = j;
      }
    }
  }
  fit_series(r, std::min(params.fit_n_min, n_max), n_max);
  r.pass = stable_rate_at_least(-r.rate, -r.tail_rate, std::log(params.mu_min), params.stability);
  return r;
}

FiFit fi_profile(const MatrixSequence& seq, const ConditionParams& params, const RateFit& svg) {
  const int n_max = params.n_max;
  require_length(seq, n_max + 1, "fast invertibility profile");
  const Window& w = seq.window();
  const ProductTable T(seq, n_max + 1);
  FiFit r;
  r.series.assign(static_cast<std::size_t>(n_max + 1), kNaN);
  r.extremal_j.assign(static_cast<std::size_t>(n_max + 1), w.lo);
  for (int n = 1; n <= n_max; ++n) {
    double best = -kInf;
    for (int j = w.lo; j + n <= w.hi; ++j) {
      const double den = T.log_s1(j, n + 1);
      const double v = std::max(T.log_s1(j, n) - den, T.log_s1(j + 1, n) - den);
      r.table.push_back({j, n, v});
      if (v > best) {
        best = v;
        r.extremal_j[static_cast<std::size_t>(n)] = j;
      }
    }
    r.series[static_cast<std::size_t>(n)] = best;
  }
  fit_series(r, std::max(1, std::min(params.fit_n_min, n_max)), n_max);
  // The fit above ignores n = 0, which has no meaning here; log_C must too.
  r.log_mu_svg = log_mu(svg);
  const double required_rate = (1.0 - params.epsilon) * r.log_mu_svg;
  r.log_C_required = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double y = r.series[static_cast<std::size_t>(n)];
    if (std::isfinite(y) && std::isfinite(required_rate))
      r.log_C_required = std::max(r.log_C_required, y - required_rate * n);
  }
  if (!(r.log_mu_svg > 0)) {
    r.horizon = kInf;
    r.pass = false;
    return r;
  }
  r.horizon = r.log_C_required / (params.epsilon * r.log_mu_svg);
  r.pass = r.rate < required_rate && r.horizon <= n_max;
  return r;
}

FiFit fi_profile(const MatrixSequence& seq, const ConditionParams& params) {
  return fi_profile(seq, params, svg_profile(seq, params));
}

FiPoint fi_point(const MatrixSequence& seq, int j, int n) {
  const double den = window_product(seq, j, n + 1).log_sigma1();
  return {window_product(seq, j, n).log_sigma1() - den, window_product(seq, j + 1, n).log_sigma1() - den};
}

NormFloor norm_floor(const MatrixSequence& seq, int n_max) {
  require_length(seq, n_max, "norm floor");
  const Window& w = seq.window();
  const ProductTable T(seq, n_max);
  NormFloor f;
  f.log_floor.assign(static_cast<std::size_t>(n_max + 1), kInf);
  f.argmin_j.assign(static_cast<std::size_t>(n_max + 1), w.lo);
  for (int n = 0; n <= n_max; ++n) {
    for (int j = w.lo; j + n - 1 <= w.hi && j <= w.hi; ++j) {
      const double v = T.log_s1(j, n);
      if (v < f.log_floor[static_cast<std::size_t>(n)]) {
        f.log_floor[static_cast<std::size_t>(n)] = v;
        f.argmin_j[static_cast<std::size_t>(n)] = j;
      }
    }
  }
  return f;
}

MatrixSequence normalize_unimodular(const MatrixSequence& seq) {
  std::vector<Mat2C> out;
  out.reserve(seq.entries().size());
  double bound = 0;
  for (const Mat2C& B : seq.entries()) {
    if (is_singular(B)) throw Error(ErrorCode::SingularMatrix, "cannot normalize a singular entry");
    const Mat2C A = (1.0 / std::sqrt(B.det())) * B;
    bound = std::max(bound, op_norm(A));
    out.push_back(A);
  }
  return MatrixSequence(seq.window(), bound * 1.25, std::move(out), seq.source());
}

RateFit ueg_check(const MatrixSequence& seq, const ConditionParams& params, double lambda_min) {
  for (int j = seq.window().lo; j <= seq.window().hi; ++j) {
    if (std::abs(seq[j].det() - 1.0) > 1e-10)
      throw Error(ErrorCode::NotUnimodular, "det B(" + std::to_string(j) + ") differs from 1");
  }
  const NormFloor f = norm_floor(seq, params.n_max);
  RateFit r;
  r.series = f.log_floor;
  r.extremal_j = f.argmin_j;
  fit_series(r, std::min(params.fit_n_min, params.n_max), params.n_max);
  r.pass = stable_rate_at_least(r.rate, r.tail_rate, std::log(lambda_min), params.stability);
  return r;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Dominated: return "dominated";
    case Verdict::NotDominated: return "not_dominated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

int interior_margin(const Window& w, int n_max) { return std::min(n_max, std::max(1, w.size() / 4)); }

DominationReport check_domination(const MatrixSequence& seq, const ConditionParams& params) {
  DominationReport rep;
  const Window w = seq.window();
  rep.window = w;
  rep.params = params;
  {
    std::ostringstream note;
    note << "finite window [" << w.lo << ", " << w.hi << "]: conclusions hold at this scale only";
    rep.notes.push_back(note.str());
  }
  bool vanished = false;

  try {
    rep.svg = svg_profile(seq, params);
    rep.fi = fi_profile(seq, params, *rep.svg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ProductVanished) vanished = true;
    rep.notes.push_back(std::string("profiles skipped: ") + e.what());
  }

  const int margin = interior_margin(w, params.n_max);
  rep.interior = {w.lo + margin, w.hi - margin};
  if (margin < params.n_max) {
    std::ostringstream note;
    note << "one-sided data near the edges: direction estimates use at most " << margin
         << " steps on the short side (n_max " << params.n_max << ")";
    rep.notes.push_back(note.str());
  }

  LineField es, eu;
  rep.min_separation = kInf;
  for (int j = rep.interior.lo; j <= rep.interior.hi; ++j) {
    FieldSample f;
    f.j = j;
    try {
      const SplittingEstimate e = try_estimate_splitting(seq, j, params.n_max, params.tol);
      f.es = e.es;
      f.eu = e.eu;
      f.converged = e.converged();
      f.n_star_s = e.n_star_s;
      f.n_star_u = e.n_star_u;
      f.separation = dist(e.eu, e.es);
    } catch (const Error& ex) {
      if (ex.code() != ErrorCode::ProductVanished) throw;
      vanished = true;
    }
    if (f.converged) {
      es[j] = f.es;
      eu[j] = f.eu;
      if (f.separation < rep.min_separation) {
        rep.min_separation = f.separation;
        rep.min_separation_j = j;
      }
    } else {
      ++rep.unresolved;
    }
    rep.fields.push_back(f);
  }

  // Smallest N with ||B_N u|| >= 2 ||B_N s|| at every resolved interior point.
  const int N_lim = std::min(params.N_max, margin + 1);
  if (!es.empty()) {
    std::vector<double> worst(static_cast<std::size_t>(N_lim + 1), kInf);
    for (const auto& [j, s] : es) {
      const Vec2 uv = eu.at(j).rep();
      const Vec2 sv = s.rep();
      ScaledProduct P;
      P.start = j;
      try {
        for (int N = 1; N <= N_lim && j + N - 1 <= w.hi; ++N) {
          P = extend_left(P, seq[j + N - 1]);
          const double gap = std::log((P.core * uv).norm()) - std::log((P.core * sv).norm());
          worst[static_cast<std::size_t>(N)] = std::min(worst[static_cast<std::size_t>(N)], gap);
        }
      } catch (const Error& ex) {
        if (ex.code() != ErrorCode::ProductVanished) throw;
        vanished = true;
      }
    }
    // A gap of exactly 2 qualifies; rounding of the norms gets a 1e-12 allowance.
    for (int N = 1; N <= N_lim; ++N) {
      if (worst[static_cast<std::size_t>(N)] >= std::log(2.0) - 1e-12) {
        rep.N_dom = N;
        rep.lambda_dom = std::exp(worst[static_cast<std::size_t>(N)]);
        break;
      }
    }
  }

  for (const auto& [j, s] : es) {
    if (!es.count(j + 1)) continue;
    try {
      const InvarianceResidual r = invariance_residual(seq, j, es, eu);
      rep.invariance_max_residual = std::max({rep.invariance_max_residual, r.res_s, r.res_u});
    } catch (const Error& ex) {
      rep.invariance_max_residual = 2.0;
      rep.notes.push_back(std::string("invariance check failed: ") + ex.what());
    }
  }

  bool floor_ok = true;
  try {
    rep.floor = norm_floor(seq, std::min(params.n_max, w.size()));
    for (double v : rep.floor.log_floor)
      if (!std::isfinite(v)) floor_ok = false;
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::ProductVanished) throw;
    floor_ok = false;
  }

  const bool all_converged = rep.unresolved == 0 && !rep.fields.empty();
  if (vanished || !floor_ok) {
    rep.verdict = Verdict::NotDominated;
    rep.violations.push_back("product_vanished: some finite product B_n(j) is zero, so the norm floor fails");
  } else if (rep.min_separation < params.sep_min) {
    rep.verdict = Verdict::NotDominated;
    std::ostringstream msg;
    msg.precision(17);
    msg << "separation_collapse: d(E^u, E^s) = " << rep.min_separation << " at j = " << rep.min_separation_j
        << " with converged directions, below sep_min " << params.sep_min;
    rep.violations.push_back(msg.str());
    const int half = std::max(1, (rep.interior.hi - rep.interior.lo) / 2);
    const int center = rep.interior.lo + half;
    if (std::abs(rep.min_separation_j - center) * 5 >= half * 4)
      rep.notes.push_back("separation shrinks toward the window edge; a wider window is expected to shrink it further");
  } else if (all_converged && rep.N_dom) {
    rep.verdict = Verdict::Dominated;
  } else if (all_converged) {
    rep.verdict = Verdict::NotDominated;
    std::ostringstream msg;
    msg << "no_expansion_gap: no N <= " << N_lim << " with |B_N u| >= 2 |B_N s| at every interior point";
    rep.violations.push_back(msg.str());
  } else {
    rep.verdict = Verdict::Inconclusive;
    std::ostringstream note;
    note << rep.unresolved << " of " << rep.fields.size() << " interior points did not settle within n_max";
    rep.notes.push_back(note.str());
  }
  if (rep.min_separation == kInf) rep.min_separation = kNaN;
  return rep;
}

}  // namespace domsplit
