#pragma once

#include <complex>

namespace domsplit {

using cplx = std::complex<double>;

namespace tol {
// Entries below this are treated as exactly zero.
inline constexpr double kEntryZero = 1e-300;
// |det A| <= kDetZero * sigma1^2 counts as singular.
inline constexpr double kDetZero = 1e-12;
// sigma1 - sigma2 <= kDegenerate * sigma1 means no distinguished contracted direction.
inline constexpr double kDegenerate = 1e-9;
// |A z| <= kKernel * sigma1 means z was mapped into the kernel.
inline constexpr double kKernel = 1e-13;
}  // namespace tol

struct Vec2 {
  cplx x{};
  cplx y{};

  double norm() const;
  bool is_finite() const;
};

Vec2 operator+(const Vec2& u, const Vec2& v);
Vec2 operator-(const Vec2& u, const Vec2& v);
Vec2 operator*(cplx s, const Vec2& v);
Vec2 operator*(double s, const Vec2& v);

// u^* v
cplx inner(const Vec2& u, const Vec2& v);
// Determinant of the matrix with columns u, v.
cplx det(const Vec2& u, const Vec2& v);
// Unit-speed orthogonal companion: det(v, orth(v)) = |v|^2.
Vec2 orth(const Vec2& v);

// Row-major [[a, b], [c, d]].
struct Mat2C {
  cplx a{};
  cplx b{};
  cplx c{};
  cplx d{};

  static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2C diag(cplx p, cplx q) { return {p, 0.0, 0.0, q}; }
  static Mat2C from_columns(const Vec2& u, const Vec2& v) { return {u.x, v.x, u.y, v.y}; }
  // u v^*
  static Mat2C outer(const Vec2& u, const Vec2& v);

  Vec2 col0() const { return {a, c}; }
  Vec2 col1() const { return {b, d}; }
  cplx det() const { return a * d - b * c; }
  cplx trace() const { return a + d; }
  Mat2C adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
  // tr(A^* A)
  double frobenius_sq() const;
  double max_abs() const;
  bool is_finite() const;
};

Mat2C operator*(const Mat2C& A, const Mat2C& B);
Vec2 operator*(const Mat2C& A, const Vec2& v);
Mat2C operator*(cplx s, const Mat2C& A);
Mat2C operator*(double s, const Mat2C& A);
Mat2C operator+(const Mat2C& A, const Mat2C& B);
Mat2C operator-(const Mat2C& A, const Mat2C& B);
Mat2C inverse(const Mat2C& A);
double max_abs_diff(const Mat2C& A, const Mat2C& B);

struct SingularValues {
  double sigma1 = 0;
  double sigma2 = 0;
};

// sigma1 >= sigma2 >= 0. sigma2 is exactly 0 when A is singular within tol::kDetZero.
SingularValues singular_values(const Mat2C& A);
// (1/sigma2, 1/sigma1); throws SingularMatrix.
SingularValues inv_singular_values(const Mat2C& A);
double op_norm(const Mat2C& A);
bool is_singular(const Mat2C& A);
// log|det A| without the singularity cutoff; -inf only for an exact zero.
double log_abs_det(const Mat2C& A);

// A = U diag(sigma1, sigma2) V^*.
// Columns of V have their first nonvanishing component real positive.
// V.col1() spans the most contracted direction, U.col0() the most expanded image.
struct Svd2 {
  Mat2C u;
  double sigma1 = 0;
  double sigma2 = 0;
  Mat2C v;
  bool degenerate = false;

  Mat2C reconstruct() const;
};

Svd2 svd2(const Mat2C& A);

// Scales v so its first nonvanishing component is real positive.
Vec2 phase_normalized(const Vec2& v);

}  // namespace domsplit
