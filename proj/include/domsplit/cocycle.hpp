#pragma once

#include <map>
#include <vector>

#include <json.hpp>

#include "domsplit/matrix2c.hpp"
#include "domsplit/projective.hpp"

namespace domsplit {

struct Window {
  int lo = 0;
  int hi = 0;

  bool contains(int j) const { return lo <= j && j <= hi; }
  bool contains(int first, int last) const { return lo <= first && last <= hi; }
  int size() const { return hi - lo + 1; }
};

// A finite window of the cocycle, j in [lo, hi]. Every entry is nonzero and
// has sigma1 strictly below bound_M.
class MatrixSequence {
 public:
  // Throws InvalidSequence.
  MatrixSequence(Window window, double bound_M, std::vector<Mat2C> entries,
                 nlohmann::json source = nullptr);

  // Throws WindowExceeded.
  const Mat2C& at(int j) const;
  const Mat2C& operator[](int j) const { return entries_[static_cast<std::size_t>(j - window_.lo)]; }

  const Window& window() const { return window_; }
  double bound_M() const { return bound_M_; }
  const std::vector<Mat2C>& entries() const { return entries_; }
  // Generator description, or null for an explicit table.
  const nlohmann::json& source() const { return source_; }
  MatrixSequence restricted(Window w) const;

 private:
  Window window_;
  double bound_M_;
  std::vector<Mat2C> entries_;
  nlohmann::json source_;
};

// B_n(j) = B(j+n-1) ... B(j) held as exp(log_scale) * core with sigma1(core) = 1.
// log_abs_det accumulates log|det B(j+k)| so sigma2 survives renormalization.
struct ScaledProduct {
  double log_scale = 0;
  Mat2C core = Mat2C::identity();
  double log_abs_det = 0;
  int start = 0;
  int length = 0;

  double log_sigma1() const { return log_scale; }
  double log_sigma2() const { return log_abs_det - log_scale; }
  // Unscaled matrix; overflows for long products.
  Mat2C matrix() const;
};

// next * P, i.e. B_{n+1}(j) from B_n(j) and B(j+n).
ScaledProduct extend_left(const ScaledProduct& P, const Mat2C& next);
// P * prev, i.e. B_{n+1}(j-1) from B_n(j) and B(j-1).
ScaledProduct extend_right(const ScaledProduct& P, const Mat2C& prev);
// later * earlier, with later starting where earlier ends.
ScaledProduct compose(const ScaledProduct& later, const ScaledProduct& earlier);

// Throws WindowExceeded, ProductVanished.
ScaledProduct window_product(const MatrixSequence& seq, int j, int n);

// s(B_n(j)) and u(B_n(j-n)). Throw Degenerate, WindowExceeded.
ProjPoint sn(const MatrixSequence& seq, int j, int n);
ProjPoint un(const MatrixSequence& seq, int j, int n);

struct SplittingEstimate {
  int j = 0;
  ProjPoint es;
  ProjPoint eu;
  bool converged_s = false;
  bool converged_u = false;
  // First n from which three successive steps stay below tol; -1 if none.
  int n_star_s = -1;
  int n_star_u = -1;
  // step_s[n-1] = d(s_n, s_{n+1}); NaN where a product was degenerate.
  std::vector<double> step_s;
  std::vector<double> step_u;
  // Fitted slope of log step against n.
  double rate_s = 0;
  double rate_u = 0;

  bool converged() const { return converged_s && converged_u; }
};

// Never throws NoConvergence; inspect converged().
SplittingEstimate try_estimate_splitting(const MatrixSequence& seq, int j, int n_max, double tol);
// Throws NoConvergence.
SplittingEstimate estimate_splitting(const MatrixSequence& seq, int j, int n_max, double tol);

using LineField = std::map<int, ProjPoint>;

struct InvarianceResidual {
  double res_s = 0;
  double res_u = 0;
  // Set when B(j) sends a field line into its kernel; E^s(j) is then compared
  // with the kernel, E^u(j+1) with the image.
  bool singular_step = false;
};

// Needs both fields at j and j+1.
InvarianceResidual invariance_residual(const MatrixSequence& seq, int j, const LineField& es,
                                       const LineField& eu);

// Kernel and image lines of a singular matrix. Throw Precondition for invertible input.
ProjPoint kernel_line(const Mat2C& A);
ProjPoint image_line(const Mat2C& A);

}  // namespace domsplit
