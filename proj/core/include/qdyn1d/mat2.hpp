#pragma once

#include <algorithm>
#include <cmath>

namespace qdyn1d {

enum class NormKind { Operator, HilbertSchmidt };

/// Real 2x2 matrix, row-major ((a,b),(c,d)). Step matrices have det == 1
/// exactly; long products keep |det - 1| below 1e-9 (see transfer.hpp).
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return Mat2{1.0, 0.0, 0.0, 1.0}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return Mat2{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator*(double s, const Mat2& m) {
    return Mat2{s * m.a, s * m.b, s * m.c, s * m.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return Mat2{x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  /// Adjugate-based inverse; exact for unit-determinant matrices.
  Mat2 inverse_unit_det() const { return Mat2{d, -b, -c, a}; }

  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

  /// Largest singular value, in closed form. sigma_max^2 is the larger root
  /// of s^2 - |M|_F^2 s + det^2.
  double op_norm() const {
    const double f2 = a * a + b * b + c * c + d * d;
    const double dt = det();
    const double disc = std::max(0.0, f2 * f2 - 4.0 * dt * dt);
    return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
  }

  double norm(NormKind kind) const {
    return kind == NormKind::Operator ? op_norm() : frobenius();
  }

  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }
};

/// One-site step matrix T(x;E) = ((E-x, -1), (1, 0)).
inline Mat2 step_matrix(double x, double E) { return Mat2{E - x, -1.0, 1.0, 0.0}; }

inline double max_abs_diff(const Mat2& x, const Mat2& y) { return (x - y).max_abs(); }

}  // namespace qdyn1d
