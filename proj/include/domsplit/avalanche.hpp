#pragma once

#include <vector>

#include "domsplit/cocycle.hpp"

namespace domsplit {

struct ApConditions {
  double mu = 0;
  // max_j sigma2(B(j)) / sigma1(B(j)); must not exceed 1/mu.
  double gap_worst = 0;
  int gap_j = 0;
  // max_j sigma1(B(j+1)) sigma1(B(j)) / sigma1(B(j+1) B(j)); must not exceed mu^(1/4).
  double pair_worst = 0;
  int pair_j = 0;
  bool gap_pass = false;
  bool pair_pass = false;

  bool pass() const { return gap_pass && pair_pass; }
};

ApConditions ap_conditions(const MatrixSequence& seq, double mu);

// |log sigma1(B_n(j)) - (sum_k log sigma1(B(j+k)) + sum_k log of the pairwise norm ratios)|.
// The identity is exact, so this measures only the product engine's rounding.
double telescoping_residual(const MatrixSequence& seq, int j, int n);

// |log|B_n| + sum_{k=1}^{n-2} log|B(j+k)| - sum_{k=0}^{n-2} log|B(j+k+1) B(j+k)||.
// Throws Precondition for n < 3.
double ap_residual(const MatrixSequence& seq, int j, int n);

struct NormAngleGap {
  // sigma1(E2 E1) / (sigma1(E2) sigma1(E1))
  double ratio = 0;
  // |(V(E2)^* U(E1))_11| = |det(s(E2), u(E1))| on unit representatives.
  double overlap = 0;
  // Chordal distance d(s(E2), u(E1)) = 2 * overlap.
  double distance = 0;
  double discrepancy = 0;  // |ratio - overlap|
  double max_gap_ratio = 0;  // max sigma2/sigma1 of E1 and E2
};

// Throws Degenerate when either factor has coinciding singular values.
NormAngleGap norm_angle_gap(const Mat2C& E1, const Mat2C& E2);

struct DirectionDrift {
  // drift[n-2] = d(x_n, x_{n-1}) for n in [2, n_max]; NaN where degenerate.
  std::vector<double> s_drift;
  std::vector<double> u_drift;
  double s_rate = 0;
  double u_rate = 0;
  double required_rate = 0;
  bool pass = false;
};

DirectionDrift direction_drift(const MatrixSequence& seq, int j, int n_max, double mu);

struct ResidualCell {
  int j = 0;
  int n = 0;
  double residual = 0;
  double bound = 0;  // n * mu^(-1/2)
};

struct ApReport {
  double mu = 0;
  int n_max = 0;
  ApConditions conditions;
  double telescoping_max = 0;
  std::vector<ResidualCell> cells;
  std::vector<double> max_residual_by_n;  // indexed by n, NaN below 3
  // Smallest C with residual <= C n mu^(-1/2) on every cell.
  double C_fit = 0;
  // Slope of max_j residual against n.
  double residual_slope = 0;
  bool envelope_holds = false;

  bool pass() const { return conditions.pass() && envelope_holds; }
};

// Empirical envelope constant for the residual bound.
inline constexpr double kApEnvelope = 5.0;

// Throws Precondition for n_max < 3.
ApReport run_avalanche(const MatrixSequence& seq, double mu, int n_max);

}  // namespace domsplit
