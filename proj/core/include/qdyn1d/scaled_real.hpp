#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace qdyn1d {

/// Real number as mantissa * 2^exponent with |mantissa| in [1,2). Trace-map
/// orbits square their magnitude every level, so doubles overflow after a
/// dozen levels off the spectrum while the wide exponent here does not.
struct ScaledReal {
  double mant = 0.0;        // 0, or |mant| in [1,2)
  std::int64_t exp2 = 0;

  ScaledReal() = default;
  ScaledReal(double v) {  // NOLINT: implicit by design
    if (v == 0.0 || !std::isfinite(v)) {
      mant = v;
      exp2 = 0;
      return;
    }
    int e = 0;
    mant = 2.0 * std::frexp(v, &e);  // frexp mantissa lies in [0.5,1)
    exp2 = e - 1;
  }

  bool is_zero() const { return mant == 0.0; }
  int sign() const { return mant > 0.0 ? 1 : (mant < 0.0 ? -1 : 0); }
  double log2_abs() const {
    return is_zero() ? -std::numeric_limits<double>::infinity()
                     : std::log2(std::abs(mant)) + static_cast<double>(exp2);
  }
  /// Collapses to double; +-inf or 0 when out of range.
  double to_double() const {
    if (is_zero()) return 0.0;
    if (exp2 > 1030) return mant > 0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
    if (exp2 < -1070) return 0.0;
    return std::ldexp(mant, static_cast<int>(exp2));
  }

  friend ScaledReal operator*(const ScaledReal& x, const ScaledReal& y) {
    if (x.is_zero() || y.is_zero()) return {};
    ScaledReal r(x.mant * y.mant);  // product in [1,4): renormalized by ctor
    r.exp2 += x.exp2 + y.exp2;
    return r;
  }

  friend ScaledReal operator+(const ScaledReal& x, const ScaledReal& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    const ScaledReal* big = &x;
    const ScaledReal* small = &y;
    if (big->exp2 < small->exp2) std::swap(big, small);
    const std::int64_t shift = big->exp2 - small->exp2;
    if (shift > 64) return *big;  // below one ulp of the larger term
    ScaledReal r(big->mant + std::ldexp(small->mant, -static_cast<int>(shift)));
    r.exp2 += big->exp2;
    return r;
  }

  friend ScaledReal operator-(const ScaledReal& x, const ScaledReal& y) {
    ScaledReal neg = y;
    neg.mant = -neg.mant;
    return x + neg;
  }

  /// |x/y - 1|, scale-safe; +inf when y == 0 != x.
  friend double rel_diff(const ScaledReal& x, const ScaledReal& y) {
    if (y.is_zero()) return x.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    if (x.is_zero()) return 1.0;
    const std::int64_t shift = x.exp2 - y.exp2;
    if (shift > 64 || shift < -64) return std::numeric_limits<double>::infinity();
    return std::abs(std::ldexp(x.mant, static_cast<int>(shift)) / y.mant - 1.0);
  }
};

}  // namespace qdyn1d
