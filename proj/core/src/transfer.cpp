#include "qdyn1d/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdyn1d/parallel.hpp"

namespace qdyn1d {

namespace {

constexpr index_t kRescaleEvery = 64;    // exact power-of-two rescaling
constexpr index_t kRenormEvery = 1024;   // sqrt(det) drift correction

// Partial product with a power-of-two scale split off: value = m * 2^log2s.
struct ScaledMat2 {
  Mat2 m = Mat2::identity();
  std::int64_t log2s = 0;

  // Pull the magnitude back to O(1). Power-of-two scaling is exact.
  void rescale() {
    const double big = m.max_abs();
    if (big == 0.0 || !std::isfinite(big)) return;
    int e = 0;
    std::frexp(big, &e);
    if (e > 16 || e < -16) {
      const double f = std::ldexp(1.0, -e);
      m = f * m;
      log2s += e;
    }
  }

  // Divide by sqrt(det) when the measured determinant is trustworthy. The
  // determinant of a product of norm s is measurable only to ~eps * s^2
  // (extended precision here, double would already cap the correction above
  // the 1e-9 contract at s ~ 1e4), so past s ~ 2^14 the "correction" would
  // inject more error than it removes and is skipped. Growth beyond that
  // scale only ever feeds norm fits, where determinant drift is irrelevant.
  void renorm_det(double* drift) {
    const double log2_norm = std::log2(std::max(m.max_abs(), 1e-300)) + static_cast<double>(log2s);
    if (log2_norm > 14.5) return;
    const long double dm = static_cast<long double>(m.a) * m.d - static_cast<long double>(m.b) * m.c;
    if (dm <= 0.0L || !std::isfinite(static_cast<double>(dm))) return;
    const double log2d =
        static_cast<double>(std::log2(dm)) + 2.0 * static_cast<double>(log2s);
    if (std::abs(log2d) > 0.5) return;
    const double d = std::exp2(log2d);
    if (drift) *drift = std::max(*drift, std::abs(d - 1.0));
    m = (1.0 / std::sqrt(d)) * m;
  }

  Mat2 materialize() const { return std::ldexp(1.0, static_cast<int>(std::clamp<std::int64_t>(log2s, -2000, 2000))) * m; }
};

// Product over sites (m, n] with n > m.
ScaledMat2 scaled_product(const PotentialSamples& V, index_t n, index_t m, double E,
                          double* det_drift) {
  ScaledMat2 acc;
  index_t steps = 0;
  for (index_t j = m + 1; j <= n; ++j) {
    acc.m = step_matrix(V[j], E) * acc.m;
    ++steps;
    if (steps % kRescaleEvery == 0) acc.rescale();
    if (steps % kRenormEvery == 0) acc.renorm_det(det_drift);
  }
  acc.rescale();
  acc.renorm_det(det_drift);
  return acc;
}

}  // namespace

Mat2 transfer_product(const PotentialSamples& V, index_t n, index_t m, double E,
                      double* det_drift) {
  if (det_drift) *det_drift = 0.0;
  if (n == m) return Mat2::identity();
  const index_t lo = std::min(n, m), hi = std::max(n, m);
  if (!V.window.contains(Window{lo + 1, hi}))
    throw OutOfWindow("transfer_product: sites (" + std::to_string(lo) + "," +
                      std::to_string(hi) + "] outside the sample window");
  const ScaledMat2 fwd = scaled_product(V, hi, lo, E, det_drift);
  if (n > m) return fwd.materialize();
  ScaledMat2 inv{fwd.m.inverse_unit_det(), -fwd.log2s};
  return inv.materialize();
}

std::vector<double> solve_difference(const PotentialSamples& V, double E, index_t m,
                                     double phi_m, double phi_m1, Window range) {
  if (!V.window.contains(range)) throw OutOfWindow("solve_difference: range outside sample window");
  if (!range.contains(m) || !range.contains(m + 1))
    throw OutOfWindow("solve_difference: initial sites m, m+1 must lie in range");

  std::vector<double> phi(static_cast<size_t>(range.length()));
  auto set = [&](index_t idx, double v) { phi[static_cast<size_t>(idx - range.lo)] = v; };
  auto get = [&](index_t idx) { return phi[static_cast<size_t>(idx - range.lo)]; };

  set(m, phi_m);
  set(m + 1, phi_m1);
  for (index_t j = m + 1; j < range.hi; ++j)  // phi(j+1) = (E - V(j)) phi(j) - phi(j-1)
    set(j + 1, (E - V[j]) * get(j) - get(j - 1));
  for (index_t j = m; j > range.lo; --j)      // phi(j-1) = (E - V(j)) phi(j) - phi(j+1)
    set(j - 1, (E - V[j]) * get(j) - get(j + 1));
  return phi;
}

GrowthProfile growth_profile(const PotentialSamples& V, double E, index_t n_max,
                             Sampling sampling, NormKind norm) {
  if (n_max < 1) throw Error("growth_profile: n_max must be >= 1");
  if (!V.window.contains(Window{1, n_max}))
    throw OutOfWindow("growth_profile: window must cover sites [1, n_max]");

  GrowthProfile out;
  out.energy = E;
  out.norm_kind = norm;

  // Anchor set: dyadic by default, plus n_max itself.
  std::vector<index_t> anchors;
  if (sampling == Sampling::All) {
    anchors.resize(static_cast<size_t>(n_max));
    for (index_t i = 1; i <= n_max; ++i) anchors[static_cast<size_t>(i - 1)] = i;
  } else {
    for (index_t a = 1; a <= n_max; a *= 2) anchors.push_back(a);
    if (anchors.back() != n_max) anchors.push_back(n_max);
  }

  // One pass of prefix products P(j) = T(j,0;E); then T(n,m) = P(n) P(m)^{-1}
  // with the unit-determinant adjugate inverse, so the sup over m <= n costs
  // O(n) per anchor instead of O(n^2) overall.
  std::vector<Mat2> pm(static_cast<size_t>(n_max) + 1);
  std::vector<std::int64_t> ps(static_cast<size_t>(n_max) + 1, 0);
  ScaledMat2 acc;
  pm[0] = acc.m;
  for (index_t j = 1; j <= n_max; ++j) {
    acc.m = step_matrix(V[j], E) * acc.m;
    if (j % kRescaleEvery == 0) acc.rescale();
    if (j % kRenormEvery == 0) acc.renorm_det(&out.det_drift);
    pm[static_cast<size_t>(j)] = acc.m;
    ps[static_cast<size_t>(j)] = acc.log2s;
  }

  // The hypothesis side is sup over all pairs m <= n' <= N, so the profile
  // carries a running maximum across anchors (monotone by construction).
  double best_log2 = 0.0;  // ||T(0,0)|| = 1
  for (index_t n : anchors) {
    const Mat2& pn = pm[static_cast<size_t>(n)];
    const std::int64_t sn = ps[static_cast<size_t>(n)];
    for (index_t m = 0; m <= n; ++m) {
      const Mat2 t = pn * pm[static_cast<size_t>(m)].inverse_unit_det();
      const double nrm = t.norm(norm);
      if (nrm <= 0.0) continue;
      best_log2 = std::max(best_log2, std::log2(nrm) + static_cast<double>(sn + ps[static_cast<size_t>(m)]));
    }
    const Mat2 t1 = pn * pm[1].inverse_unit_det();
    const double anchor_log2 =
        std::log2(std::max(t1.norm(norm), std::numeric_limits<double>::min())) +
        static_cast<double>(sn + ps[1]);

    out.n.push_back(n);
    out.sup_log2.push_back(best_log2);
    out.sup_value.push_back(std::exp2(best_log2));
    out.anchor_log2.push_back(anchor_log2);
    out.anchor_value.push_back(std::exp2(anchor_log2));
  }
  return out;
}

PowerLawFit fit_power_law(const GrowthProfile& profile) {
  const size_t cnt = profile.n.size();
  if (cnt < 4) throw Error("fit_power_law: need at least 4 sample points");

  // Fit only the upper half of the samples; the hypothesis is asymptotic and
  // small-n transients would bias the exponent.
  const size_t start = cnt / 2 > cnt - 4 ? cnt - 4 : cnt / 2;
  const size_t used = cnt - start;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  constexpr double kLn2 = 0.69314718055994530942;
  for (size_t i = start; i < cnt; ++i) {
    const double x = std::log(static_cast<double>(profile.n[i]));
    const double y = kLn2 * profile.sup_log2[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = used * sxx - sx * sx;
  PowerLawFit fit;
  if (denom <= 0.0) {  // all anchors coincide
    fit.alpha_hat = 0.0;
    fit.c_hat = std::exp(sy / used);
    fit.residual = 0.0;
    return fit;
  }
  fit.alpha_hat = (used * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.alpha_hat * sx) / used;
  fit.c_hat = std::exp(intercept);
  double ss = 0;
  for (size_t i = start; i < cnt; ++i) {
    const double x = std::log(static_cast<double>(profile.n[i]));
    const double y = kLn2 * profile.sup_log2[i];
    const double r = y - (fit.alpha_hat * x + intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / used);
  return fit;
}

std::vector<double> monodromy_energies(double b, int k, double tol) {
  if (k < 3 || k % 2 == 0) throw Error("monodromy_energies: k must be odd and >= 3");

  // T(b,E)^k = +-I exactly where its lower-left entry vanishes; that entry
  // is a degree-(k-1) polynomial in E with k-1 simple sign-changing zeros in
  // (b-2, b+2). (The trace of T^k only touches +-2 at these energies, so it
  // is useless for bracketing.)
  auto entry = [b, k](double E) {
    Mat2 t = Mat2::identity();
    const Mat2 step = step_matrix(b, E);
    for (int i = 0; i < k; ++i) t = step * t;
    return t.c;
  };

  const index_t grid_n = 1000 * static_cast<index_t>(k);
  const double lo = b - 2.0, hi = b + 2.0;
  const double h = (hi - lo) / static_cast<double>(grid_n);

  std::vector<double> roots;
  double x0 = lo, f0 = entry(x0);
  for (index_t i = 1; i <= grid_n; ++i) {
    const double x1 = lo + h * static_cast<double>(i);
    const double f1 = entry(x1);
    if (f0 == 0.0) roots.push_back(x0);
    if (f0 * f1 < 0.0) {
      double a = x0, fa = f0, c = x1, fc = f1;
      for (int it = 0; it < 200 && c - a > 1e-15 * (2.0 + std::abs(b)); ++it) {
        const double mid = 0.5 * (a + c);
        const double fm = entry(mid);
        if (fm == 0.0) {
          a = c = mid;
          break;
        }
        (fa * fm < 0.0 ? c : a) = mid;
        (fa * fm < 0.0 ? fc : fa) = fm;
      }
      // Secant polish on the bracket midpoint.
      double r0 = a, r1 = c, g0 = entry(r0), g1 = entry(r1);
      for (int it = 0; it < 8 && g1 != g0; ++it) {
        const double r2 = r1 - g1 * (r1 - r0) / (g1 - g0);
        if (!(r2 > lo && r2 < hi)) break;
        r0 = r1;
        g0 = g1;
        r1 = r2;
        g1 = entry(r1);
      }
      roots.push_back(r1);
    }
    x0 = x1;
    f0 = f1;
  }

  if (static_cast<int>(roots.size()) != k - 1)
    throw RootFindingFailure("monodromy_energies: expected " + std::to_string(k - 1) +
                             " roots, found " + std::to_string(roots.size()));
  std::sort(roots.begin(), roots.end());

  for (double e0 : roots) {
    Mat2 t = Mat2::identity();
    const Mat2 step = step_matrix(b, e0);
    for (int i = 0; i < k; ++i) t = step * t;
    const double sign = t.a > 0.0 ? 1.0 : -1.0;
    const Mat2 target{sign, 0.0, 0.0, sign};
    if (max_abs_diff(t, target) > tol)
      throw RootFindingFailure("monodromy_energies: root failed the +-I check at tolerance");
  }
  return roots;
}

std::vector<ScanRow> energy_scan(const PotentialSamples& V, std::span<const double> grid,
                                 index_t n_max, NormKind norm, int threads) {
  std::vector<ScanRow> rows(grid.size());
  parallel_for(
      grid.size(),
      [&](size_t i) {
        rows[i].energy = grid[i];
        try {
          rows[i].fit = fit_power_law(growth_profile(V, grid[i], n_max, Sampling::Dyadic, norm));
        } catch (const Error& e) {
          rows[i].ok = false;
          rows[i].error = e.what();
        }
      },
      threads);
  return rows;
}

}  // namespace qdyn1d
