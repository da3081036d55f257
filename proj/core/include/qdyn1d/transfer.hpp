#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdyn1d/mat2.hpp"
#include "qdyn1d/potentials.hpp"

namespace qdyn1d {

/// T(n,m;E): ordered product T(V(n);E)...T(V(m+1);E) for n > m, the identity
/// for n = m, and the inverse of T(m,n;E) for n < m. Requires the site range
/// (min+1..max) to lie inside V.window. Products are renormalized every 2^10
/// factors; if det_drift is non-null it receives the largest |det - 1| seen
/// before each renormalization.
Mat2 transfer_product(const PotentialSamples& V, index_t n, index_t m, double E,
                      double* det_drift = nullptr);

/// Solve phi(n+1) + phi(n-1) + V(n) phi(n) = E phi(n) with the two values
/// phi(m) and phi(m+1) given; returns phi on `range` (which must contain m,
/// m+1 and lie inside V.window). Brute-force oracle for transfer columns.
std::vector<double> solve_difference(const PotentialSamples& V, double E, index_t m,
                                     double phi_m, double phi_m1, Window range);

enum class Sampling { Dyadic, All };

/// Norm-growth data at one energy: for each anchor n, the hypothesis-side
/// quantity sup_{0 <= m <= n} ||T(n,m;E)|| together with the single-anchor
/// series ||T(n,1;E)||. Values are carried in log2 form as well since
/// off-spectrum growth overflows doubles long before n_max is reached.
struct GrowthProfile {
  double energy = 0.0;
  NormKind norm_kind = NormKind::Operator;
  std::vector<index_t> n;
  std::vector<double> sup_value;        // may be +inf when 2^log2 overflows
  std::vector<double> sup_log2;
  std::vector<double> anchor_value;     // ||T(n,1;E)||
  std::vector<double> anchor_log2;
  double det_drift = 0.0;
};

GrowthProfile growth_profile(const PotentialSamples& V, double E, index_t n_max,
                             Sampling sampling = Sampling::Dyadic,
                             NormKind norm = NormKind::Operator);

struct PowerLawFit {
  double alpha_hat = 0.0;
  double c_hat = 1.0;
  double residual = 0.0;  // rms of the log-log fit
};

/// Least-squares fit of log(sup value) against log n over the upper half of
/// the sampled anchors (transient prefixes are discarded).
PowerLawFit fit_power_law(const GrowthProfile& profile);

/// The k-1 energies in (b-2, b+2) where T(b,E)^k = +-I, i.e. where the
/// k-periodic monodromy of the constant potential b sits at a degenerate gap
/// edge. Root-finding brackets sign changes of the lower-left entry of
/// T(b,E)^k, which vanishes simply at exactly these energies, then polishes
/// to `tol` on ||T(b,E)^k -+ I||.
std::vector<double> monodromy_energies(double b, int k, double tol = 1e-12);

struct ScanRow {
  double energy = 0.0;
  PowerLawFit fit;
  bool ok = true;
  std::string error;
};

/// Independent growth_profile + fit_power_law per grid energy. Rows come back
/// in grid order regardless of the number of worker threads.
std::vector<ScanRow> energy_scan(const PotentialSamples& V, std::span<const double> grid,
                                 index_t n_max, NormKind norm = NormKind::Operator,
                                 int threads = 0);

}  // namespace qdyn1d
