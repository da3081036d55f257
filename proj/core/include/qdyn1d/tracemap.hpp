#pragma once

#include <vector>

#include "qdyn1d/scaled_real.hpp"
#include "qdyn1d/transfer.hpp"

namespace qdyn1d {

/// Monodromy traces x_m = tr T(2^m, 0; E) of the hierarchical model
/// V(n) = lambda * f(ord n), f(m) = sum_{k<m} R^k.
struct TraceOrbit {
  double lambda = 1.0;
  double ratio = 1.0;  // R
  double energy = 0.0;
  std::vector<ScaledReal> x;  // x[0..m_max]
  bool saturated = false;     // exponent range guard tripped

  double x_double(int m) const { return x[static_cast<size_t>(m)].to_double(); }
};

/// Orbit of the autonomous recurrence
///   x_{m+1} = x_m^2 - 2 + R x_m (x_m - x_{m-1}^2 + 2),   m >= 1,
/// seeded by x_0 = E and x_1 = tr T(2,0;E) from the explicit two-site product.
TraceOrbit trace_orbit(double E, double lambda, double R, int m_max);

/// All 2^m zeros of E -> x_m(E); simple zeros, lower/upper gap edges of the
/// hierarchical operator.
struct GapEdgeSet {
  int level = 0;
  std::vector<double> energies;  // sorted, size 2^m
};

GapEdgeSet gap_edge_energies(int m, double lambda, double R, double tol = 1e-12);

/// Gap-edge solution envelope f_R(l): (2/(2-R)) l for R < 2, l log2 l at
/// R = 2, and (2/R)^{frac(log2 l)} R^2 / (2(R-1)(R-2)) l^{log2 R} for R > 2.
double f_R(double l, double R);

struct GapEdgeNormCheck {
  PowerLawFit fit;          // exponent fitted on the growth profile
  double ratio_sup = 0.0;   // sup over dyadic n of sup-norm / f_R(2^{-m-1} n)
  double empirical_c = 0.0; // same sup: the constant C_{lambda,R}(m, E_mk)
  GrowthProfile profile;
};

/// Check ||T(n,n';E_mk)|| <= C f_R(2^{-m-1} n) on dyadic n up to n_max
/// (a multiple of 2^{m+1}); E_mk must be a zero of x_m.
GapEdgeNormCheck gap_edge_norm_check(int m, double E_mk, double lambda, double R, index_t n_max);

struct GapEdgeSolutions {
  std::vector<double> psi_d;  // psi_D(0..n_max), psi_D(0)=0, psi_D(1)=1
  std::vector<double> psi_n;  // psi_N(0..n_max), psi_N(0)=1, psi_N(1)=0
  double antiperiodicity_defect = 0.0;   // max |psi_D(k+2^{m+1}) + psi_D(k)|
  std::vector<double> ratio_l;           // l = 1, 2, 4, ...
  std::vector<double> ratio;             // [psi_N((2l+1)2^m)-psi_N(2^m)] / ((-1)^{l+1} lambda_m f_R(l))
  double lambda_m = 0.0;                 // lambda R^m x_{m-1} ... x_0
};

GapEdgeSolutions gap_edge_solutions(int m, double E_mk, double lambda, double R, index_t n_max);

}  // namespace qdyn1d
