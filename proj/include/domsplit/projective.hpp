#pragma once

#include <optional>

#include "domsplit/matrix2c.hpp"

namespace domsplit {

// A complex line through the origin, stored as a unit representative whose
// first nonvanishing component is real positive. Finite(z) is span(1, z),
// infinity is span(0, 1).
class ProjPoint {
 public:
  ProjPoint() : rep_{1.0, 0.0} {}

  static ProjPoint finite(cplx z);
  static ProjPoint infinity() { return ProjPoint(Vec2{0.0, 1.0}); }
  // Throws ZeroVector.
  static ProjPoint from_vector(const Vec2& v);

  const Vec2& rep() const { return rep_; }
  bool is_infinity() const { return rep_.x == 0.0; }
  std::optional<cplx> affine() const;

 private:
  explicit ProjPoint(const Vec2& unit) : rep_(unit) {}
  Vec2 rep_;
};

inline ProjPoint project(const Vec2& v) { return ProjPoint::from_vector(v); }

// Chordal distance 2|det(u, w)| of unit representatives, in [0, 2].
double dist(const ProjPoint& z, const ProjPoint& w);
double dist_from_vectors(const Vec2& u, const Vec2& v);

// Throws KernelHit when |A z| <= tol::kKernel * sigma1(A).
ProjPoint act(const Mat2C& A, const ProjPoint& z);
ProjPoint perp(const ProjPoint& z);
// Local contraction |det A| / (|A z| |A w|) on unit representatives.
double contraction_factor(const Mat2C& A, const ProjPoint& z, const ProjPoint& w);

// Most contracted direction s(A) and most expanded image u(A).
// Both throw Degenerate when sigma1 and sigma2 coincide within tol::kDegenerate.
ProjPoint contracted_direction(const Mat2C& A);
ProjPoint expanded_image(const Mat2C& A);

}  // namespace domsplit
