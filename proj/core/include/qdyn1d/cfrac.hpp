#pragma once

#include <vector>

#include "qdyn1d/bigint.hpp"
#include "qdyn1d/potentials.hpp"

namespace qdyn1d {

/// Continued-fraction expansion omega = 1/(a_1 + 1/(a_2 + ...)).
struct CFExpansion {
  std::vector<std::int64_t> a;  // partial quotients, all >= 1
  bool exact = false;           // surd arithmetic (any depth) vs floating
  bool truncated = false;       // floating mode ran out of precision

  int depth() const { return static_cast<int>(a.size()); }
};

/// Expand omega in (0,1) to `depth` partial quotients. Surd inputs use the
/// exact integer recurrence for quadratic irrationals; floating inputs use
/// the Euclidean algorithm and stop early (truncated flag) once the working
/// precision cannot support another reliable quotient.
CFExpansion cf_expand(const RotationNumber& omega, int depth);

struct Convergent {
  BigUint p, q;
};

/// Rational approximants from p_0/q_0 = 0/1, p_1/q_1 = 1/a_1 onward; exact
/// integer recurrences p_k = a_k p_{k-1} + p_{k-2}.
std::vector<Convergent> convergents(const CFExpansion& exp);

struct BoundedDensity {
  double d_hat = 0.0;                 // finite-depth limsup surrogate
  std::vector<double> running;        // running averages (1/n) sum a_k
};

/// limsup (1/n) sum a_k estimated as the max running average over the tail
/// half of the expansion. Requires depth >= 10.
BoundedDensity bounded_density(const CFExpansion& exp);

struct SturmianExponent {
  double d_hat = 0.0;
  double c_lambda = 0.0;  // 2 + sqrt(8 + lambda^2)
  double alpha = 0.0;     // D * d_hat * log(c_lambda)
  double universal_d = 1.0;
};

/// alpha(lambda, omega) = D * d(omega) * log C_lambda with C_lambda =
/// 2 + sqrt(8 + lambda^2). D is caller-supplied; the universal constant is
/// not pinned down by the theory, so reports always carry it alongside.
SturmianExponent sturmian_alpha(double lambda, const CFExpansion& exp, double universal_d = 1.0);

}  // namespace qdyn1d
