#pragma once

#include <vector>

namespace domsplit {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double residual_max = 0;
  int points = 0;
};

// Least squares y ~ intercept + slope * x over the pairs where y is finite.
// With fewer than two usable points slope and intercept are NaN.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace domsplit
