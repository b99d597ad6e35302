#include "domsplit/projective.hpp"

#include <algorithm>
#include <cmath>

#include "domsplit/error.hpp"

namespace domsplit {

ProjPoint ProjPoint::finite(cplx z) { return from_vector(Vec2{1.0, z}); }

ProjPoint ProjPoint::from_vector(const Vec2& v) {
  if (!v.is_finite()) throw Error(ErrorCode::ZeroVector, "non-finite vector");
  const double s = std::max(std::abs(v.x), std::abs(v.y));
  if (s <= tol::kEntryZero) throw Error(ErrorCode::ZeroVector, "cannot project the zero vector");
  Vec2 w = (1.0 / s) * v;
  w = (1.0 / w.norm()) * w;
  return ProjPoint(phase_normalized(w));
}

std::optional<cplx> ProjPoint::affine() const {
  if (is_infinity()) return std::nullopt;
  return rep_.y / rep_.x;
}

double dist(const ProjPoint& z, const ProjPoint& w) {
  return std::min(2.0, 2.0 * std::abs(det(z.rep(), w.rep())));
}

double dist_from_vectors(const Vec2& u, const Vec2& v) { return dist(project(u), project(v)); }

namespace {

Vec2 image_checked(const Mat2C& A, const ProjPoint& z) {
  const double s1 = op_norm(A);
  const Vec2 w = A * z.rep();
  if (w.norm() <= tol::kKernel * s1) throw Error(ErrorCode::KernelHit, "point lies in the kernel");
  return w;
}

}  // namespace

ProjPoint act(const Mat2C& A, const ProjPoint& z) { return project(image_checked(A, z)); }

ProjPoint perp(const ProjPoint& z) { return project(orth(z.rep())); }

double contraction_factor(const Mat2C& A, const ProjPoint& z, const ProjPoint& w) {
  const double nz = image_checked(A, z).norm();
  const double nw = image_checked(A, w).norm();
  return std::abs(A.det()) / (nz * nw);
}

ProjPoint contracted_direction(const Mat2C& A) {
  const Svd2 f = svd2(A);
  if (f.degenerate) throw Error(ErrorCode::Degenerate, "singular values coincide");
  return project(f.v.col1());
}

ProjPoint expanded_image(const Mat2C& A) {
  const Svd2 f = svd2(A);
  if (f.degenerate) throw Error(ErrorCode::Degenerate, "singular values coincide");
  return project(f.u.col0());
}

}  // namespace domsplit
