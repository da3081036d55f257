#include "qdyn1d/tracemap.hpp"

#include <algorithm>
#include <cmath>

#include "qdyn1d/tridiag.hpp"

namespace qdyn1d {

namespace {

constexpr std::int64_t kSaturationExp = std::int64_t{1} << 50;

PotentialSamples hierarchical_samples(double lambda, double R, Window w) {
  PotentialSpec spec;
  spec.family = Family::Hierarchical;
  spec.coupling = lambda;
  spec.ratio = R;
  spec.max_window = std::max<index_t>(w.length() + 2, index_t{1} << 26);
  return realize(spec, w);
}

}  // namespace

TraceOrbit trace_orbit(double E, double lambda, double R, int m_max) {
  if (m_max < 1) throw Error("trace_orbit: m_max must be >= 1");
  TraceOrbit orbit;
  orbit.lambda = lambda;
  orbit.ratio = R;
  orbit.energy = E;
  orbit.x.reserve(static_cast<size_t>(m_max) + 1);

  orbit.x.emplace_back(E);  // x_0 = tr T(1,0;E) = E - V(1) with V(1) = 0

  // x_1 from the explicit two-site product: V(1) = 0, V(2) = lambda.
  const Mat2 m1 = step_matrix(lambda, E) * step_matrix(0.0, E);
  orbit.x.emplace_back(m1.trace());

  const ScaledReal two(2.0), r(R);
  for (int m = 1; m < m_max; ++m) {
    const ScaledReal& xm = orbit.x[static_cast<size_t>(m)];
    const ScaledReal& xp = orbit.x[static_cast<size_t>(m - 1)];
    // x_{m+1} = x_m^2 - 2 + R x_m (x_m - x_{m-1}^2 + 2)
    const ScaledReal next = xm * xm - two + r * xm * (xm - xp * xp + two);
    orbit.x.push_back(next);
    if (std::abs(next.exp2) > kSaturationExp) {
      orbit.saturated = true;
      break;
    }
  }
  return orbit;
}

GapEdgeSet gap_edge_energies(int m, double lambda, double R, double tol) {
  if (m < 0) throw Error("gap_edge_energies: m must be >= 0");
  if (m > 12) throw Error("gap_edge_energies: level cap is m <= 12");
  GapEdgeSet set;
  set.level = m;

  if (m == 0) {  // x_0(E) = E
    set.energies = {0.0};
    return set;
  }

  // Extended-precision orbit evaluation; near zeros the trace values are
  // tame, far away they blow up to inf (harmless for the secant).
  auto x_m = [&](long double e) {
    long double x0 = e;
    const Mat2 m1 = step_matrix(lambda, static_cast<double>(e)) * step_matrix(0.0, static_cast<double>(e));
    long double x1 = static_cast<long double>(m1.trace());
    for (int j = 1; j < m; ++j) {
      const long double next = x1 * x1 - 2.0L + R * x1 * (x1 - x0 * x0 + 2.0L);
      x0 = x1;
      x1 = next;
    }
    return x1;
  };

  // x_m(E) = 0 forces T(2^{m+1}, 0; E) = -I, hence psi_D(2^{m+1}) = 0: the
  // Dirichlet spectrum of the tridiagonal block on sites [1, 2^{m+1} - 1]
  // is precisely the union over j <= m of the zeros of x_j (counts match:
  // sum 2^j = 2^{m+1} - 1, and x_j = 0 forces |x_i| = 2 for i > j, so the
  // level sets are disjoint). The level-m zeros are therefore the set
  // difference of two Dirichlet spectra - an exact classification, where
  // uniform grids would already need ~1e9 points at m = 6 and thresholding
  // on |x_m| fails at the steep outer zeros.
  auto dirichlet_spectrum = [&](index_t top) {
    const PotentialSamples v = hierarchical_samples(lambda, R, {1, top});
    std::vector<double> diag(static_cast<size_t>(top));
    for (index_t n = 1; n <= top; ++n) diag[static_cast<size_t>(n - 1)] = v[n];
    return tridiag_eigenvalues(std::move(diag),
                               std::vector<double>(static_cast<size_t>(top - 1), 1.0));
  };

  const index_t want = index_t{1} << m;
  const std::vector<double> full = dirichlet_spectrum((index_t{1} << (m + 1)) - 1);
  const std::vector<double> lower = dirichlet_spectrum((index_t{1} << m) - 1);

  std::vector<bool> taken(full.size(), false);
  for (double e : lower) {
    size_t best_i = full.size();
    double best_d = 1e300;
    for (size_t i = 0; i < full.size(); ++i) {
      if (taken[i]) continue;
      const double d = std::abs(full[i] - e);
      if (d < best_d) {
        best_d = d;
        best_i = i;
      }
    }
    if (best_i == full.size() || best_d > 1e-8 * (1.0 + std::abs(e)))
      throw RootFindingFailure("gap_edge_energies: lower-level zero did not match the block spectrum");
    taken[best_i] = true;
  }

  for (size_t i = 0; i < full.size(); ++i) {
    if (taken[i]) continue;
    // Secant polish in extended precision; the initial step sits far below
    // the cluster spacing so the iteration stays at its own zero.
    const double seed = full[i];
    const long double scale = 1.0L + std::abs(static_cast<long double>(seed));
    long double best = seed;
    long double best_g = std::abs(x_m(seed));
    long double r0 = seed, r1 = seed + std::max(1e-12L * scale, static_cast<long double>(tol));
    long double g0 = x_m(r0), g1 = x_m(r1);
    for (int it = 0; it < 40 && g1 != g0; ++it) {
      const long double r2 = r1 - g1 * (r1 - r0) / (g1 - g0);
      if (!std::isfinite(static_cast<double>(r2)) || std::abs(r2 - seed) > 1e-6L * scale) break;
      r0 = r1;
      g0 = g1;
      r1 = r2;
      g1 = x_m(r1);
      if (std::abs(g1) < best_g) {
        best = r1;
        best_g = std::abs(g1);
      }
      if (std::abs(r1 - r0) <= 1e-18L * scale) break;
    }
    set.energies.push_back(static_cast<double>(best));
  }

  std::sort(set.energies.begin(), set.energies.end());
  if (static_cast<index_t>(set.energies.size()) != want)
    throw RootFindingFailure("gap_edge_energies: found " + std::to_string(set.energies.size()) +
                             " of " + std::to_string(want) + " zeros of x_" + std::to_string(m));
  return set;
}

double f_R(double l, double R) {
  if (!(l >= 1.0)) throw Error("f_R: l must be >= 1");
  if (!(R > 0.0)) throw Error("f_R: R must be positive");
  if (R < 2.0) return 2.0 / (2.0 - R) * l;
  if (R == 2.0) return l * std::log2(l);
  const double eps_l = std::log2(l) - std::floor(std::log2(l));
  return std::pow(2.0 / R, eps_l) * R * R / (2.0 * (R - 1.0) * (R - 2.0)) *
         std::pow(l, std::log2(R));
}

GapEdgeNormCheck gap_edge_norm_check(int m, double E_mk, double lambda, double R, index_t n_max) {
  const index_t block = index_t{1} << (m + 1);
  if (n_max % block != 0) throw Error("gap_edge_norm_check: n_max must be a multiple of 2^(m+1)");
  if (m > 0) {
    const TraceOrbit orbit = trace_orbit(E_mk, lambda, R, m);
    if (std::abs(orbit.x_double(m)) > 1e-6)
      throw Error("gap_edge_norm_check: E_mk is not a zero of x_m");
  } else if (std::abs(E_mk) > 1e-6) {
    throw Error("gap_edge_norm_check: E_mk is not a zero of x_0");
  }

  GapEdgeNormCheck out;
  const PotentialSamples v = hierarchical_samples(lambda, R, {1, n_max});
  out.profile = growth_profile(v, E_mk, n_max, Sampling::Dyadic, NormKind::Operator);
  out.fit = fit_power_law(out.profile);

  out.ratio_sup = 0.0;
  for (size_t i = 0; i < out.profile.n.size(); ++i) {
    const double l = static_cast<double>(out.profile.n[i]) / static_cast<double>(block);
    if (l < 1.0) continue;
    const double f = f_R(l, R);
    if (f <= 0.0) continue;
    out.ratio_sup = std::max(out.ratio_sup, out.profile.sup_value[i] / f);
  }
  out.empirical_c = out.ratio_sup;
  return out;
}

GapEdgeSolutions gap_edge_solutions(int m, double E_mk, double lambda, double R, index_t n_max) {
  const index_t block = index_t{1} << (m + 1);
  if (n_max % block != 0) throw Error("gap_edge_solutions: n_max must be a multiple of 2^(m+1)");

  GapEdgeSolutions out;
  const PotentialSamples v = hierarchical_samples(lambda, R, {1, n_max});

  auto solve = [&](double psi0, double psi1) {
    std::vector<double> psi(static_cast<size_t>(n_max) + 1);
    psi[0] = psi0;
    psi[1] = psi1;
    for (index_t n = 1; n < n_max; ++n)
      psi[static_cast<size_t>(n + 1)] = (E_mk - v[n]) * psi[static_cast<size_t>(n)] -
                                        psi[static_cast<size_t>(n - 1)];
    return psi;
  };
  out.psi_d = solve(0.0, 1.0);
  out.psi_n = solve(1.0, 0.0);

  for (index_t k = 0; k + block <= n_max; ++k)
    out.antiperiodicity_defect =
        std::max(out.antiperiodicity_defect,
                 std::abs(out.psi_d[static_cast<size_t>(k + block)] + out.psi_d[static_cast<size_t>(k)]));

  out.lambda_m = lambda * std::pow(R, m);
  if (m > 0) {
    const TraceOrbit orbit = trace_orbit(E_mk, lambda, R, std::max(m, 1));
    for (int j = 0; j < m; ++j) out.lambda_m *= orbit.x_double(j);
  }

  const index_t stride = index_t{1} << m;
  const double psin_base = out.psi_n[static_cast<size_t>(stride)];
  for (index_t l = 1; (2 * l + 1) * stride <= n_max; l *= 2) {
    const double f = f_R(static_cast<double>(l), R);
    if (f <= 0.0) continue;
    const double sign = l % 2 == 0 ? -1.0 : 1.0;  // (-1)^{l+1}
    const double num = out.psi_n[static_cast<size_t>((2 * l + 1) * stride)] - psin_base;
    out.ratio_l.push_back(static_cast<double>(l));
    out.ratio.push_back(num / (sign * out.lambda_m * f));
  }
  return out;
}

}  // namespace qdyn1d
