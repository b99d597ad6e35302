#include "domsplit/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "domsplit/error.hpp"
#include "domsplit/fit.hpp"

namespace domsplit {

MatrixSequence::MatrixSequence(Window window, double bound_M, std::vector<Mat2C> entries,
                               nlohmann::json source)
    : window_(window), bound_M_(bound_M), entries_(std::move(entries)), source_(std::move(source)) {
  if (window_.hi < window_.lo) throw Error(ErrorCode::InvalidSequence, "empty window");
  if (entries_.size() != static_cast<std::size_t>(window_.size()))
    throw Error(ErrorCode::InvalidSequence, "entry count does not match the window");
  if (!(bound_M_ > 0) || !std::isfinite(bound_M_))
    throw Error(ErrorCode::InvalidSequence, "bound_M must be positive and finite");
  for (int j = window_.lo; j <= window_.hi; ++j) {
    const Mat2C& B = (*this)[j];
    if (!B.is_finite()) throw Error(ErrorCode::InvalidSequence, "non-finite entry at j=" + std::to_string(j));
    if (B.max_abs() <= tol::kEntryZero)
      throw Error(ErrorCode::InvalidSequence, "zero matrix at j=" + std::to_string(j));
    if (!(op_norm(B) < bound_M_))
      throw Error(ErrorCode::InvalidSequence, "norm reaches bound_M at j=" + std::to_string(j));
  }
}

const Mat2C& MatrixSequence::at(int j) const {
  if (!window_.contains(j)) throw Error(ErrorCode::WindowExceeded, "index " + std::to_string(j) + " outside window");
  return (*this)[j];
}

MatrixSequence MatrixSequence::restricted(Window w) const {
  if (!window_.contains(w.lo, w.hi)) throw Error(ErrorCode::WindowExceeded, "restriction leaves the window");
  std::vector<Mat2C> sub(entries_.begin() + (w.lo - window_.lo), entries_.begin() + (w.hi - window_.lo + 1));
  return MatrixSequence(w, bound_M_, std::move(sub), source_);
}

Mat2C ScaledProduct::matrix() const { return std::exp(log_scale) * core; }

namespace {

void renormalize(ScaledProduct& P) {
  double s = 0;
  if (P.core.is_finite() && P.core.max_abs() > tol::kEntryZero) s = op_norm(P.core);
  if (!(s > tol::kEntryZero))
    throw Error(ErrorCode::ProductVanished, "product starting at j=" + std::to_string(P.start) + " vanished");
  P.core = (1.0 / s) * P.core;
  P.log_scale += std::log(s);
}

}  // namespace

ScaledProduct extend_left(const ScaledProduct& P, const Mat2C& next) {
  ScaledProduct out = P;
  out.core = next * P.core;
  out.log_abs_det += log_abs_det(next);
  out.length += 1;
  renormalize(out);
  return out;
}

ScaledProduct extend_right(const ScaledProduct& P, const Mat2C& prev) {
  ScaledProduct out = P;
  out.core = P.core * prev;
  out.log_abs_det += log_abs_det(prev);
  out.length += 1;
  out.start -= 1;
  renormalize(out);
  return out;
}

ScaledProduct compose(const ScaledProduct& later, const ScaledProduct& earlier) {
  if (later.start != earlier.start + earlier.length)
    throw Error(ErrorCode::Precondition, "products are not adjacent");
  ScaledProduct out;
  out.start = earlier.start;
  out.length = earlier.length + later.length;
  out.core = later.core * earlier.core;
  out.log_scale = later.log_scale + earlier.log_scale;
  out.log_abs_det = later.log_abs_det + earlier.log_abs_det;
  renormalize(out);
  return out;
}

ScaledProduct window_product(const MatrixSequence& seq, int j, int n) {
  if (n < 0) throw Error(ErrorCode::Precondition, "negative product length");
  ScaledProduct P;
  P.start = j;
  if (n == 0) return P;
  if (!seq.window().contains(j, j + n - 1))
    throw Error(ErrorCode::WindowExceeded,
                "product [" + std::to_string(j) + ", " + std::to_string(j + n - 1) + "] leaves the window");
  for (int k = 0; k < n; ++k) P = extend_left(P, seq[j + k]);
  return P;
}

ProjPoint sn(const MatrixSequence& seq, int j, int n) {
  return contracted_direction(window_product(seq, j, n).core);
}

ProjPoint un(const MatrixSequence& seq, int j, int n) {
  return expanded_image(window_product(seq, j - n, n).core);
}

namespace {

struct Chain {
  ProjPoint estimate;
  bool converged = false;
  int n_star = -1;
  std::vector<double> steps;
  double rate = std::numeric_limits<double>::quiet_NaN();
};

// Distances below this are rounding noise and are left out of the rate fit.
constexpr double kStepNoise = 1e-15;

// direction(n) returns the n-th iterate or nullopt when the product is degenerate.
Chain run_chain(int n_lim, double tol, const std::function<std::optional<ProjPoint>(int)>& direction) {
  Chain c;
  std::optional<ProjPoint> prev;
  int streak = 0;
  for (int n = 1; n <= n_lim; ++n) {
    const std::optional<ProjPoint> cur = direction(n);
    if (n >= 2) {
      const double step = (prev && cur) ? dist(*prev, *cur) : std::numeric_limits<double>::quiet_NaN();
      c.steps.push_back(step);
      streak = (step < tol) ? streak + 1 : 0;
    }
    if (cur) c.estimate = *cur;
    prev = cur;
    if (streak == 3) {
      c.converged = true;
      c.n_star = n - 3;
      break;
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    if (c.steps[i] > kStepNoise) {
      xs.push_back(static_cast<double>(i + 1));
      ys.push_back(std::log(c.steps[i]));
    }
  }
  c.rate = fit_line(xs, ys).slope;
  return c;
}

std::optional<ProjPoint> non_degenerate(const Svd2& f, bool contracted) {
  if (f.degenerate) return std::nullopt;
  return project(contracted ? f.v.col1() : f.u.col0());
}

}  // namespace

SplittingEstimate try_estimate_splitting(const MatrixSequence& seq, int j, int n_max, double tol) {
  if (!seq.window().contains(j)) throw Error(ErrorCode::WindowExceeded, "j outside window");
  SplittingEstimate out;
  out.j = j;
  const Window& w = seq.window();

  ScaledProduct fwd;
  fwd.start = j;
  const int lim_s = std::min(n_max, w.hi - j + 1);
  Chain cs = run_chain(lim_s, tol, [&](int n) {
    fwd = extend_left(fwd, seq[j + n - 1]);
    return non_degenerate(svd2(fwd.core), true);
  });

  ScaledProduct bwd;
  bwd.start = j;
  const int lim_u = std::min(n_max, j - w.lo);
  Chain cu = run_chain(lim_u, tol, [&](int n) {
    bwd = extend_right(bwd, seq[j - n]);
    return non_degenerate(svd2(bwd.core), false);
  });

  out.es = cs.estimate;
  out.eu = cu.estimate;
  out.converged_s = cs.converged;
  out.converged_u = cu.converged;
  out.n_star_s = cs.n_star;
  out.n_star_u = cu.n_star;
  out.step_s = std::move(cs.steps);
  out.step_u = std::move(cu.steps);
  out.rate_s = cs.rate;
  out.rate_u = cu.rate;
  return out;
}

SplittingEstimate estimate_splitting(const MatrixSequence& seq, int j, int n_max, double tol) {
  SplittingEstimate e = try_estimate_splitting(seq, j, n_max, tol);
  if (!e.converged())
    throw Error(ErrorCode::NoConvergence, "direction estimates at j=" + std::to_string(j) + " did not settle");
  return e;
}

ProjPoint kernel_line(const Mat2C& A) {
  if (!is_singular(A)) throw Error(ErrorCode::Precondition, "kernel of an invertible matrix");
  return project(svd2(A).v.col1());
}

ProjPoint image_line(const Mat2C& A) {
  if (!is_singular(A)) throw Error(ErrorCode::Precondition, "image line of an invertible matrix");
  return project(svd2(A).u.col0());
}

InvarianceResidual invariance_residual(const MatrixSequence& seq, int j, const LineField& es,
                                       const LineField& eu) {
  auto get = [](const LineField& f, int k) -> const ProjPoint& {
    auto it = f.find(k);
    if (it == f.end()) throw Error(ErrorCode::Precondition, "field missing at j=" + std::to_string(k));
    return it->second;
  };
  const Mat2C& B = seq.at(j);
  InvarianceResidual r;
  // A line the step sends into the kernel must be the kernel itself; an
  // expanded line then has to be the image.
  try {
    r.res_s = dist(act(B, get(es, j)), get(es, j + 1));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::KernelHit) throw;
    r.singular_step = true;
    r.res_s = dist(get(es, j), kernel_line(B));
  }
  try {
    r.res_u = dist(act(B, get(eu, j)), get(eu, j + 1));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::KernelHit) throw;
    r.singular_step = true;
    r.res_u = dist(get(eu, j + 1), image_line(B));
  }
  return r;
}

}  // namespace domsplit
