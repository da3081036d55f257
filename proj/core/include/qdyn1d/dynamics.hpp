#pragma once

#include <complex>
#include <vector>

#include "qdyn1d/potentials.hpp"

namespace qdyn1d {

/// Finite section of H psi(n) = psi(n-1) + psi(n+1) + V(n) psi(n): symmetric
/// tridiagonal with unit hopping. HalfLine lives on sites [1, L] (Dirichlet
/// at 0 and L+1), WholeLine on [-L, L] (Dirichlet cutoffs at +-(L+1)).
struct LatticeOperator {
  Geometry geometry = Geometry::HalfLine;
  index_t L = 0;
  std::vector<double> diag;

  index_t size() const { return static_cast<index_t>(diag.size()); }
  index_t site_of(index_t i) const { return geometry == Geometry::HalfLine ? i + 1 : i - L; }
  index_t index_of_site(index_t n) const { return geometry == Geometry::HalfLine ? n - 1 : n + L; }
  index_t origin_index() const { return index_of_site(1); }  // initial state delta_1
  index_t extent() const { return L; }                       // largest |site|
};

LatticeOperator build_operator(const PotentialSamples& V, Geometry geometry, index_t L);

/// Spectral data of the finite lattice. w1(j) = u_j(site 1) so that
/// sum_j w1_j^2 delta_{E_j} is the finite-volume surrogate of the spectral
/// measure of (H, delta_1).
struct EigenData {
  std::vector<double> evals;
  std::vector<double> z;   // column-major, column j = u_j
  std::vector<double> w1;  // u_j(1)
  index_t n = 0;

  double u(index_t i, index_t j) const { return z[static_cast<size_t>(i + n * j)]; }
};

EigenData diagonalize(const LatticeOperator& op);

/// Abel-averaged site probabilities
///   a(n,T) = (1/T) int_0^inf e^{-2t/T} |<delta_n, e^{-itH} delta_1>|^2 dt,
/// evaluated in closed form on the finite lattice:
///   a(n,T) = sum_{j,k} u_j(n) u_j(1) u_k(n) u_k(1) * 2 / (4 + T^2 (E_j-E_k)^2).
/// Indexed by lattice index (use op.site_of). Sums to 1/2 exactly.
std::vector<double> abel_amplitudes(const EigenData& eig, double T);

/// Abel-average mass within `margin` sites of the truncation boundary (the
/// artificial cutoffs only: site L for the half line, sites +-L for the
/// whole line).
double boundary_mass(const std::vector<double>& a, const LatticeOperator& op, index_t margin = 10);

/// Time-averaged moment <|X|^p>(T) = sum_n |n|^p a(n,T).
double moment(const std::vector<double>& a, const LatticeOperator& op, double p);

/// P(T) = sum_{|n| >= N(T)} a(n,T) with N(T) = T^{1/(1+alpha)}. Throws
/// FiniteSizeViolation when N(T) > extent/2 or the boundary carries mass.
struct OutsideProbability {
  double value = 0.0;
  double n_of_t = 0.0;
};
OutsideProbability outside_probability(const std::vector<double>& a, const LatticeOperator& op,
                                       double alpha, double T);

/// Borel transform F(E + i eps) = sum_j w1_j^2 / (E_j - E - i eps) of the
/// finite-volume spectral measure; Herglotz (Im F > 0) for eps > 0.
std::complex<double> borel_transform(const EigenData& eig, double E, double eps);

/// Spectral-measure surrogate mu_hat([lo,hi]) = sum_{E_j in [lo,hi]} w1_j^2.
double mu_hat(const EigenData& eig, double lo, double hi);

struct TransportFit {
  double p = 0.0;
  double beta_hat = 0.0;      // global log-log slope
  double beta_liminf = 0.0;   // min of consecutive two-point slopes
  bool flagged = false;       // some T values excluded by the guard
  int used = 0;
};

/// Least-squares slope of log moment vs log T over guard-passing T values.
TransportFit transport_exponent(const std::vector<double>& T_grid,
                                const std::vector<double>& moments,
                                const std::vector<bool>& guard_ok, double p);

enum class BetaBound {
  MomentFromPowerLawSet,   // (p - 3a) / (1 + a)
  MomentAtEigenvalue,      // (p + 1 - 2a) / (1 + a)
  PerturbedSingleEnergy,   // (p - 1 - 4a) / (1 + a)
  IsolatedOddBlocks,       // (p - 5) / 2
  EvenBlocksElliptic,      // p - 1
};

double predicted_beta_bound(BetaBound bound, double p, double alpha);

struct HarnessRow {
  double T = 0.0;
  double lhs = 0.0;       // <|X|^p>(T)
  double rhs = 0.0;       // T^{(p-3a)/(1+a)} (1/T + mu_hat([E0-1/T, E0+1/T]))
  double ratio = 0.0;
  double mu_window = 0.0;
  bool guard_ok = true;
};

/// Scaling check of the single-energy moment bound: the ratio lhs/rhs should
/// stay bounded below across the grid (the constant is existential).
std::vector<HarnessRow> bound_scaling_harness(const EigenData& eig, const LatticeOperator& op,
                                              double alpha, double p, double E0,
                                              const std::vector<double>& T_grid, int threads = 0);

/// One full dynamics run: amplitudes, moments per (T, p), P(T), guards.
struct DynamicsRow {
  double T = 0.0;
  double total_mass = 0.0;
  double boundary = 0.0;
  bool guard_ok = true;
  double p_t = 0.0;       // P(T), NaN if the finite-size guard refused
  double n_of_t = 0.0;
  std::vector<double> moments;  // one per requested p
};

struct DynamicsReport {
  std::vector<double> T_grid;
  std::vector<double> p_list;
  double alpha = 0.0;
  std::vector<DynamicsRow> rows;
  std::vector<TransportFit> fits;  // one per p
};

DynamicsReport dynamics_report(const EigenData& eig, const LatticeOperator& op,
                               const std::vector<double>& T_grid, const std::vector<double>& p_list,
                               double alpha, int threads = 0);

}  // namespace qdyn1d
