#include "qdyn1d/cfrac.hpp"

#include <cmath>

namespace qdyn1d {

namespace {

std::int64_t isqrt_i64(std::int64_t x) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

std::int64_t floor_div_i64(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

// Exact expansion of (P0 + sqrt(D)) / Q0 via the integer recurrence for
// quadratic irrationals; emits quotients from a_0 = floor(x) onward.
void expand_surd(std::int64_t P, std::int64_t D, std::int64_t Q, int count,
                 std::vector<std::int64_t>& out) {
  // Normalize so that Q divides D - P^2.
  if ((D - P * P) % Q != 0) {
    P *= std::abs(Q);
    D *= Q * Q;
    Q *= std::abs(Q);
  }
  const std::int64_t root = isqrt_i64(D);
  for (int k = 0; k <= count; ++k) {
    // floor((P + sqrt(D))/Q): replace sqrt(D) by floor or ceil per sign(Q).
    const std::int64_t num = P + (Q > 0 ? root : root + 1);
    const std::int64_t a = floor_div_i64(num, Q);
    if (k > 0) out.push_back(a);
    P = a * Q - P;
    Q = (D - P * P) / Q;
    if (Q == 0) throw RationalInput("surd expansion terminated; input is rational");
  }
}

}  // namespace

CFExpansion cf_expand(const RotationNumber& omega, int depth) {
  if (depth < 1) throw Error("cf_expand: depth must be >= 1");

  CFExpansion exp;
  if (omega.is_surd) {
    exp.exact = true;
    expand_surd(-omega.p, omega.d, omega.q, depth, exp.a);
    return exp;
  }

  // Euclidean expansion in extended precision, tracking how the input
  // uncertainty is amplified. A quotient is only emitted while the
  // fractional remainder stays resolvable.
  exp.exact = false;
  long double x = omega.approx;
  long double err = std::abs(x) * 1.1e-16L + 1e-18L;  // half-ulp of the double input
  for (int k = 0; k < depth; ++k) {
    if (x <= 4.0L * err) {
      if (err < 1e-14L)
        throw RationalInput("cf_expand: remainder vanished; input is rational at working precision");
      exp.truncated = true;
      break;
    }
    const long double inv = 1.0L / x;
    const long double a = std::floor(inv);
    const long double frac = inv - a;
    const long double err_inv = err * inv * inv + 1e-18L * inv;
    if (frac <= 3.0L * err_inv || frac >= 1.0L - 3.0L * err_inv) {
      if (frac <= 3.0L * err_inv && err_inv < 1e-14L)
        throw RationalInput("cf_expand: remainder vanished; input is rational at working precision");
      exp.truncated = true;
      break;
    }
    exp.a.push_back(static_cast<std::int64_t>(a));
    x = frac;
    err = err_inv;
  }
  if (exp.a.empty()) throw Error("cf_expand: no reliable partial quotient at working precision");
  return exp;
}

std::vector<Convergent> convergents(const CFExpansion& exp) {
  std::vector<Convergent> out;
  out.reserve(exp.a.size() + 1);
  out.push_back({BigUint(0), BigUint(1)});  // p0/q0
  if (exp.a.empty()) return out;
  out.push_back({BigUint(1), BigUint(static_cast<std::uint64_t>(exp.a[0]))});  // p1/q1 = 1/a1
  for (size_t k = 1; k < exp.a.size(); ++k) {
    const auto ak = static_cast<std::uint64_t>(exp.a[k]);
    out.push_back({out[k].p * ak + out[k - 1].p, out[k].q * ak + out[k - 1].q});
  }
  return out;
}

BoundedDensity bounded_density(const CFExpansion& exp) {
  if (exp.depth() < 10) throw Error("bounded_density: need depth >= 10");
  BoundedDensity bd;
  bd.running.reserve(exp.a.size());
  double sum = 0.0;
  for (size_t n = 0; n < exp.a.size(); ++n) {
    sum += static_cast<double>(exp.a[n]);
    bd.running.push_back(sum / static_cast<double>(n + 1));
  }
  const size_t depth = exp.a.size();
  bd.d_hat = 0.0;
  for (size_t n = depth / 2; n <= depth; ++n)
    bd.d_hat = std::max(bd.d_hat, bd.running[n - 1]);
  return bd;
}

SturmianExponent sturmian_alpha(double lambda, const CFExpansion& exp, double universal_d) {
  if (lambda == 0.0) throw ZeroCoupling("sturmian_alpha: lambda must be nonzero");
  if (!(universal_d > 0.0)) throw Error("sturmian_alpha: D must be positive");
  SturmianExponent s;
  s.universal_d = universal_d;
  s.d_hat = bounded_density(exp).d_hat;
  s.c_lambda = 2.0 + std::sqrt(8.0 + lambda * lambda);
  s.alpha = universal_d * s.d_hat * std::log(s.c_lambda);
  return s;
}

}  // namespace qdyn1d
