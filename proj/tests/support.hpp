#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "domsplit/matrix2c.hpp"

namespace testing_support {

using domsplit::cplx;
using domsplit::Mat2C;
using domsplit::Vec2;

// Test-side randomness, separate from the library's generators.
struct Rand {
  std::mt19937_64 rng;
  explicit Rand(std::uint64_t seed) : rng(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  cplx gaussian() { return {normal(), normal()}; }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  Vec2 vec() { return {gaussian(), gaussian()}; }
  Mat2C matrix() { return {gaussian(), gaussian(), gaussian(), gaussian()}; }

  // Random matrix with prescribed singular values and random unitary factors.
  Mat2C with_singular_values(double s1, double s2) {
    return unitary() * Mat2C::diag(s1, s2) * unitary().adjoint();
  }

  Mat2C unitary() {
    Vec2 u = vec();
    u = (1.0 / u.norm()) * u;
    const cplx ph = std::polar(1.0, uniform(0.0, 6.283185307179586));
    return Mat2C::from_columns(u, ph * domsplit::orth(u));
  }
};

inline Eigen::Matrix2cd to_eigen(const Mat2C& A) {
  Eigen::Matrix2cd M;
  M << A.a, A.b, A.c, A.d;
  return M;
}

struct OracleSvd {
  double sigma1;
  double sigma2;
  Eigen::Vector2cd contracted;  // right singular vector of sigma2
  Eigen::Vector2cd expanded_image;  // left singular vector of sigma1
};

inline OracleSvd oracle_svd(const Mat2C& A) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(to_eigen(A), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.singularValues()(0), svd.singularValues()(1), svd.matrixV().col(1), svd.matrixU().col(0)};
}

inline Vec2 from_eigen(const Eigen::Vector2cd& v) { return {v(0), v(1)}; }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_support
