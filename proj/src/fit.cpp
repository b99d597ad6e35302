#include "domsplit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace domsplit {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  double sx = 0, sy = 0;
  int k = 0;
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) continue;
    sx += x[i];
    sy += y[i];
    ++k;
  }
  out.points = k;
  if (k < 2) {
    out.slope = out.intercept = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) continue;
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  out.slope = sxx > 0 ? sxy / sxx : 0.0;
  out.intercept = my - out.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) continue;
    out.residual_max = std::max(out.residual_max, std::abs(y[i] - out.intercept - out.slope * x[i]));
  }
  return out;
}

}  // namespace domsplit
