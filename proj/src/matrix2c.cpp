#include "domsplit/matrix2c.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "domsplit/error.hpp"

namespace domsplit {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::KernelHit: return "KernelHit";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::WindowExceeded: return "WindowExceeded";
    case ErrorCode::ProductVanished: return "ProductVanished";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::Precondition: return "Precondition";
  }
  return "Unknown";
}

double Vec2::norm() const { return std::hypot(std::abs(x), std::abs(y)); }

bool Vec2::is_finite() const {
  return std::isfinite(x.real()) && std::isfinite(x.imag()) && std::isfinite(y.real()) &&
         std::isfinite(y.imag());
}

Vec2 operator+(const Vec2& u, const Vec2& v) { return {u.x + v.x, u.y + v.y}; }
Vec2 operator-(const Vec2& u, const Vec2& v) { return {u.x - v.x, u.y - v.y}; }
Vec2 operator*(cplx s, const Vec2& v) { return {s * v.x, s * v.y}; }
Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

cplx inner(const Vec2& u, const Vec2& v) { return std::conj(u.x) * v.x + std::conj(u.y) * v.y; }
cplx det(const Vec2& u, const Vec2& v) { return u.x * v.y - u.y * v.x; }
Vec2 orth(const Vec2& v) { return {-std::conj(v.y), std::conj(v.x)}; }

Mat2C Mat2C::outer(const Vec2& u, const Vec2& v) {
  return {u.x * std::conj(v.x), u.x * std::conj(v.y), u.y * std::conj(v.x), u.y * std::conj(v.y)};
}

double Mat2C::frobenius_sq() const { return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d); }

double Mat2C::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

bool Mat2C::is_finite() const { return col0().is_finite() && col1().is_finite(); }

Mat2C operator*(const Mat2C& A, const Mat2C& B) {
  return {A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d, A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d};
}

Vec2 operator*(const Mat2C& A, const Vec2& v) { return {A.a * v.x + A.b * v.y, A.c * v.x + A.d * v.y}; }
Mat2C operator*(cplx s, const Mat2C& A) { return {s * A.a, s * A.b, s * A.c, s * A.d}; }
Mat2C operator*(double s, const Mat2C& A) { return {s * A.a, s * A.b, s * A.c, s * A.d}; }
Mat2C operator+(const Mat2C& A, const Mat2C& B) { return {A.a + B.a, A.b + B.b, A.c + B.c, A.d + B.d}; }
Mat2C operator-(const Mat2C& A, const Mat2C& B) { return {A.a - B.a, A.b - B.b, A.c - B.c, A.d - B.d}; }

Mat2C inverse(const Mat2C& A) {
  if (is_singular(A)) throw Error(ErrorCode::SingularMatrix, "inverse of a singular matrix");
  const cplx k = 1.0 / A.det();
  return {k * A.d, -k * A.b, -k * A.c, k * A.a};
}

double max_abs_diff(const Mat2C& A, const Mat2C& B) { return (A - B).max_abs(); }

namespace {

// Entries of A^*A for A scaled to unit max entry:
// [[p, m], [conj(m), q]], with eigenvalues (p+q)/2 +- r.
struct Gram {
  double scale = 0;
  Mat2C scaled;
  double p = 0;
  double q = 0;
  cplx m{};
  double h = 0;
  double r = 0;
  double sigma1 = 0;  // of the scaled matrix
  double abs_det = 0;  // of the scaled matrix
};

Gram gram(const Mat2C& A) {
  if (!A.is_finite()) throw Error(ErrorCode::ZeroMatrix, "matrix has non-finite entries");
  Gram g;
  g.scale = A.max_abs();
  if (g.scale <= tol::kEntryZero) throw Error(ErrorCode::ZeroMatrix, "all entries vanish");
  g.scaled = (1.0 / g.scale) * A;
  const Mat2C& S = g.scaled;
  g.p = std::norm(S.a) + std::norm(S.c);
  g.q = std::norm(S.b) + std::norm(S.d);
  g.m = std::conj(S.a) * S.b + std::conj(S.c) * S.d;
  g.h = 0.5 * (g.p - g.q);
  // sqrt(tr^2/4 - |det|^2) written without cancellation.
  g.r = std::hypot(g.h, std::abs(g.m));
  g.sigma1 = std::sqrt(0.5 * (g.p + g.q) + g.r);
  g.abs_det = std::abs(S.det());
  return g;
}

double scaled_sigma2(const Gram& g) {
  if (g.abs_det <= tol::kDetZero * g.sigma1 * g.sigma1) return 0.0;
  return g.abs_det / g.sigma1;
}

}  // namespace

SingularValues singular_values(const Mat2C& A) {
  const Gram g = gram(A);
  return {g.sigma1 * g.scale, scaled_sigma2(g) * g.scale};
}

SingularValues inv_singular_values(const Mat2C& A) {
  const SingularValues sv = singular_values(A);
  if (sv.sigma2 == 0.0) throw Error(ErrorCode::SingularMatrix, "no inverse singular values");
  return {1.0 / sv.sigma2, 1.0 / sv.sigma1};
}

double op_norm(const Mat2C& A) { return singular_values(A).sigma1; }

bool is_singular(const Mat2C& A) { return singular_values(A).sigma2 == 0.0; }

double log_abs_det(const Mat2C& A) {
  const double s = A.max_abs();
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  const double d = std::abs(((1.0 / s) * A).det());
  if (d == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(d) + 2.0 * std::log(s);
}

Vec2 phase_normalized(const Vec2& v) {
  const double ax = std::abs(v.x);
  if (ax > 0.0) return {ax, (std::conj(v.x) / ax) * v.y};
  const double ay = std::abs(v.y);
  if (ay > 0.0) return {0.0, ay};
  return v;
}

Mat2C Svd2::reconstruct() const { return u * Mat2C::diag(sigma1, sigma2) * v.adjoint(); }

Svd2 svd2(const Mat2C& A) {
  const Gram g = gram(A);
  Svd2 out;
  out.sigma1 = g.sigma1 * g.scale;
  out.sigma2 = scaled_sigma2(g) * g.scale;
  out.degenerate = (out.sigma1 - out.sigma2) <= tol::kDegenerate * out.sigma1;

  // Eigenvector of A^*A for the top eigenvalue, taken from whichever row of
  // (A^*A - sigma1^2 I) has the larger pivot. Both candidates have norm >= r.
  Vec2 v1;
  if (g.r == 0.0) {
    v1 = {1.0, 0.0};
  } else if (g.h >= 0.0) {
    v1 = {g.r + g.h, std::conj(g.m)};
  } else {
    v1 = {g.m, g.r - g.h};
  }
  v1 = phase_normalized((1.0 / v1.norm()) * v1);
  const Vec2 v2 = phase_normalized(orth(v1));
  out.v = Mat2C::from_columns(v1, v2);

  Vec2 u1 = g.scaled * v1;
  u1 = (1.0 / u1.norm()) * u1;
  // A v2 = sigma2 * omega * orth(u1) with omega = phase(det A) * det V.
  const cplx dA = g.scaled.det();
  const cplx phase = std::abs(dA) > 0.0 ? dA / std::abs(dA) : cplx(1.0);
  const cplx omega = phase * out.v.det();
  out.u = Mat2C::from_columns(u1, omega * orth(u1));
  return out;
}

}  // namespace domsplit
