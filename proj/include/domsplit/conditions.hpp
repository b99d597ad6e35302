#pragma once

#include <optional>
#include <string>
#include <vector>

#include "domsplit/cocycle.hpp"

namespace domsplit {

struct ConditionParams {
  int n_max = 40;
  double epsilon = 0.1;
  double mu_min = 1.05;
  double sep_min = 1e-4;
  int N_max = 64;
  // Convergence tolerance for the direction estimates.
  double tol = 1e-10;
  // Smallest n used in rate fits; earlier steps are transient.
  int fit_n_min = 2;
  // Exponential behaviour must persist: the upper-half rate has to reach this
  // fraction of the full-range rate. Polynomial decay fails this.
  double stability = 0.6;
};

struct RatioEntry {
  int j = 0;
  int n = 0;
  double log_ratio = 0;
};

// Log-linear fit of a per-n series: series[n] ~ intercept + rate * n.
struct RateFit {
  std::vector<double> series;  // natural log, indexed by n from 0; -inf for an exact zero
  std::vector<int> extremal_j;  // j attaining the sup (or inf) at each n
  std::vector<RatioEntry> table;
  int n_lo = 0;
  int n_hi = 0;
  double rate = 0;
  double intercept = 0;
  double tail_rate = 0;  // fit over the upper half of [n_lo, n_hi]
  double residual_max = 0;
  // series[n] <= log_C + rate * n for every tabulated n.
  double log_C = 0;
  bool pass = false;
};

// Fitted log mu for a singular value gap profile.
inline double log_mu(const RateFit& svg) { return -svg.rate; }

struct FiFit : RateFit {
  double log_mu_svg = 0;
  // Smallest log C with series[n] <= log C + (1 - eps) n log mu, floored at 0.
  double log_C_required = 0;
  // Steps needed before mu^(-eps n) beats that constant.
  double horizon = 0;
};

// sup_j max{sigma2(B_n(j)), sigma2(B_n(j+1))} / sigma1(B_{n+1}(j)) for n in [0, n_max].
// Throws WindowExceeded when the window holds fewer than n_max + 1 entries.
RateFit svg_profile(const MatrixSequence& seq, const ConditionParams& params);

// sup_j max{sigma1(B_n(j)), sigma1(B_n(j+1))} / sigma1(B_{n+1}(j)) for n in [1, n_max].
FiFit fi_profile(const MatrixSequence& seq, const ConditionParams& params, const RateFit& svg);
FiFit fi_profile(const MatrixSequence& seq, const ConditionParams& params);

// The two pointwise ratios at a single (j, n), natural log.
struct FiPoint {
  double log_first = 0;   // sigma1(B_n(j)) / sigma1(B_{n+1}(j))
  double log_second = 0;  // sigma1(B_n(j+1)) / sigma1(B_{n+1}(j))
};
FiPoint fi_point(const MatrixSequence& seq, int j, int n);

struct NormFloor {
  std::vector<double> log_floor;  // inf_j log sigma1(B_n(j)), n in [0, n_max]
  std::vector<int> argmin_j;
};
NormFloor norm_floor(const MatrixSequence& seq, int n_max);

// Divides each B(j) by a square root of its determinant. Throws SingularMatrix.
MatrixSequence normalize_unimodular(const MatrixSequence& seq);

// Uniform exponential growth of inf_j ||A_n(j)|| for determinant-one input.
// Throws NotUnimodular.
RateFit ueg_check(const MatrixSequence& seq, const ConditionParams& params, double lambda_min);

enum class Verdict { Dominated, NotDominated, Inconclusive };
const char* verdict_name(Verdict v);

struct FieldSample {
  int j = 0;
  ProjPoint es;
  ProjPoint eu;
  bool converged = false;
  int n_star_s = -1;
  int n_star_u = -1;
  double separation = 0;
};

struct DominationReport {
  Window window;
  Window interior;
  ConditionParams params;
  std::optional<RateFit> svg;
  std::optional<FiFit> fi;
  std::vector<FieldSample> fields;
  int unresolved = 0;
  double min_separation = 0;
  int min_separation_j = 0;
  std::optional<int> N_dom;
  double lambda_dom = 0;
  double invariance_max_residual = 0;
  NormFloor floor;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};

DominationReport check_domination(const MatrixSequence& seq, const ConditionParams& params);

// Directions are estimated only where at least this many steps exist on both sides.
int interior_margin(const Window& w, int n_max);

}  // namespace domsplit
