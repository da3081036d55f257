#include "qdyn1d/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdyn1d/parallel.hpp"
#include "qdyn1d/tridiag.hpp"

extern "C" {
void dgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
            const double* alpha, const double* a, const int* lda, const double* b, const int* ldb,
            const double* beta, double* c, const int* ldc);
}

namespace qdyn1d {

namespace {
constexpr double kBoundaryMassTol = 1e-8;
}

LatticeOperator build_operator(const PotentialSamples& V, Geometry geometry, index_t L) {
  if (L < 1) throw Error("build_operator: L must be >= 1");
  LatticeOperator op;
  op.geometry = geometry;
  op.L = L;
  const Window need = geometry == Geometry::HalfLine ? Window{1, L} : Window{-L, L};
  if (!V.window.contains(need))
    throw OutOfWindow("build_operator: potential window does not cover the lattice");
  op.diag.resize(static_cast<size_t>(need.length()));
  for (index_t n = need.lo; n <= need.hi; ++n)
    op.diag[static_cast<size_t>(n - need.lo)] = V[n];
  return op;
}

EigenData diagonalize(const LatticeOperator& op) {
  EigenData eig;
  eig.n = op.size();
  std::vector<double> off(static_cast<size_t>(eig.n > 0 ? eig.n - 1 : 0), 1.0);
  tridiag_eigensystem(op.diag, off, eig.evals, eig.z);
  eig.w1.resize(static_cast<size_t>(eig.n));
  const index_t o = op.origin_index();
  for (index_t j = 0; j < eig.n; ++j) eig.w1[static_cast<size_t>(j)] = eig.u(o, j);
  return eig;
}

std::vector<double> abel_amplitudes(const EigenData& eig, double T) {
  if (!(T > 0.0)) throw Error("abel_amplitudes: T must be positive");
  const index_t n = eig.n;
  const auto sz = static_cast<size_t>(n) * static_cast<size_t>(n);

  // a = diag(G K G^T) with G(i,j) = u_j(i) w1_j carrying the origin weights
  // and the Abel kernel K(j,k) = 2 / (4 + T^2 (E_j - E_k)^2); one dgemm per T.
  std::vector<double> g(sz), k(sz), h(sz);
  for (index_t j = 0; j < n; ++j) {
    const double wj = eig.w1[static_cast<size_t>(j)];
    const double* col = eig.z.data() + static_cast<size_t>(n) * j;
    double* gcol = g.data() + static_cast<size_t>(n) * j;
    for (index_t i = 0; i < n; ++i) gcol[i] = col[i] * wj;
  }
  for (index_t j = 0; j < n; ++j) {
    const double ej = eig.evals[static_cast<size_t>(j)];
    double* kcol = k.data() + static_cast<size_t>(n) * j;
    for (index_t i = 0; i < n; ++i) {
      const double d = T * (eig.evals[static_cast<size_t>(i)] - ej);
      kcol[i] = 2.0 / (4.0 + d * d);
    }
  }

  const int ni = static_cast<int>(n);
  const double one = 1.0, zero = 0.0;
  dgemm_("N", "N", &ni, &ni, &ni, &one, g.data(), &ni, k.data(), &ni, &zero, h.data(), &ni);

  std::vector<double> a(static_cast<size_t>(n), 0.0);
  for (index_t j = 0; j < n; ++j) {
    const double* gcol = g.data() + static_cast<size_t>(n) * j;
    const double* hcol = h.data() + static_cast<size_t>(n) * j;
    for (index_t i = 0; i < n; ++i) a[static_cast<size_t>(i)] += gcol[i] * hcol[i];
  }
  return a;
}

double boundary_mass(const std::vector<double>& a, const LatticeOperator& op, index_t margin) {
  const index_t n = op.size();
  double mass = 0.0;
  for (index_t i = 0; i < n; ++i) {
    const index_t site = op.site_of(i);
    const bool near_cut = op.geometry == Geometry::HalfLine
                              ? site > op.L - margin
                              : (site > op.L - margin || site < -op.L + margin);
    if (near_cut) mass += a[static_cast<size_t>(i)];
  }
  return mass;
}

double moment(const std::vector<double>& a, const LatticeOperator& op, double p) {
  if (!(p > 0.0)) throw Error("moment: p must be positive");
  double m = 0.0;
  for (index_t i = 0; i < op.size(); ++i) {
    const auto site = static_cast<double>(std::abs(op.site_of(i)));
    if (site > 0.0) m += std::pow(site, p) * a[static_cast<size_t>(i)];
  }
  return m;
}

OutsideProbability outside_probability(const std::vector<double>& a, const LatticeOperator& op,
                                       double alpha, double T) {
  if (alpha < 0.0) throw Error("outside_probability: alpha must be >= 0");
  OutsideProbability out;
  out.n_of_t = std::pow(T, 1.0 / (1.0 + alpha));
  if (out.n_of_t > 0.5 * static_cast<double>(op.extent()))
    throw FiniteSizeViolation("outside_probability: N(T) exceeds half the lattice extent");
  if (boundary_mass(a, op) > kBoundaryMassTol)
    throw FiniteSizeViolation("outside_probability: truncation boundary carries mass");
  for (index_t i = 0; i < op.size(); ++i)
    if (static_cast<double>(std::abs(op.site_of(i))) >= out.n_of_t)
      out.value += a[static_cast<size_t>(i)];
  return out;
}

std::complex<double> borel_transform(const EigenData& eig, double E, double eps) {
  if (!(eps > 0.0)) throw Error("borel_transform: eps must be positive");
  std::complex<double> f = 0.0;
  const std::complex<double> zc(E, eps);
  for (index_t j = 0; j < eig.n; ++j) {
    const double w = eig.w1[static_cast<size_t>(j)];
    f += w * w / (eig.evals[static_cast<size_t>(j)] - zc);
  }
  return f;
}

double mu_hat(const EigenData& eig, double lo, double hi) {
  double m = 0.0;
  for (index_t j = 0; j < eig.n; ++j) {
    const double e = eig.evals[static_cast<size_t>(j)];
    if (e >= lo && e <= hi) m += eig.w1[static_cast<size_t>(j)] * eig.w1[static_cast<size_t>(j)];
  }
  return m;
}

TransportFit transport_exponent(const std::vector<double>& T_grid,
                                const std::vector<double>& moments,
                                const std::vector<bool>& guard_ok, double p) {
  if (T_grid.size() != moments.size() || T_grid.size() != guard_ok.size())
    throw Error("transport_exponent: mismatched inputs");
  if (T_grid.size() < 5) throw Error("transport_exponent: need at least 5 T values");

  TransportFit fit;
  fit.p = p;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < T_grid.size(); ++i) {
    if (!guard_ok[i]) {
      fit.flagged = true;
      continue;
    }
    xs.push_back(std::log(T_grid[i]));
    ys.push_back(std::log(moments[i]));
  }
  fit.used = static_cast<int>(xs.size());
  if (fit.used < 2) throw FiniteSizeViolation("transport_exponent: fewer than 2 guarded T values");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double nn = static_cast<double>(xs.size());
  fit.beta_hat = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);

  fit.beta_liminf = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < xs.size(); ++i)
    fit.beta_liminf = std::min(fit.beta_liminf, (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
  return fit;
}

double predicted_beta_bound(BetaBound bound, double p, double alpha) {
  if (alpha < 0.0) throw Error("predicted_beta_bound: alpha must be >= 0");
  switch (bound) {
    case BetaBound::MomentFromPowerLawSet:
      return (p - 3.0 * alpha) / (1.0 + alpha);
    case BetaBound::MomentAtEigenvalue:
      return (p + 1.0 - 2.0 * alpha) / (1.0 + alpha);
    case BetaBound::PerturbedSingleEnergy:
      return (p - 1.0 - 4.0 * alpha) / (1.0 + alpha);
    case BetaBound::IsolatedOddBlocks:
      return (p - 5.0) / 2.0;
    case BetaBound::EvenBlocksElliptic:
      return p - 1.0;
  }
  throw Error("predicted_beta_bound: unknown bound id");
}

std::vector<HarnessRow> bound_scaling_harness(const EigenData& eig, const LatticeOperator& op,
                                              double alpha, double p, double E0,
                                              const std::vector<double>& T_grid, int threads) {
  if (op.extent() < 4) throw FiniteSizeViolation("bound_scaling_harness: lattice too small");
  std::vector<HarnessRow> rows(T_grid.size());
  parallel_for(
      T_grid.size(),
      [&](size_t i) {
        HarnessRow& r = rows[i];
        r.T = T_grid[i];
        const std::vector<double> a = abel_amplitudes(eig, r.T);
        const double n_of_t = std::pow(r.T, 1.0 / (1.0 + alpha));
        r.guard_ok = n_of_t <= 0.5 * static_cast<double>(op.extent()) &&
                     boundary_mass(a, op) <= kBoundaryMassTol;
        r.lhs = moment(a, op, p);
        r.mu_window = mu_hat(eig, E0 - 1.0 / r.T, E0 + 1.0 / r.T);
        r.rhs = std::pow(r.T, (p - 3.0 * alpha) / (1.0 + alpha)) * (1.0 / r.T + r.mu_window);
        r.ratio = r.lhs / r.rhs;
      },
      threads);
  bool any = false;
  for (const auto& r : rows) any = any || r.guard_ok;
  if (!any) throw FiniteSizeViolation("bound_scaling_harness: no T value passes the finite-size guard");
  return rows;
}

DynamicsReport dynamics_report(const EigenData& eig, const LatticeOperator& op,
                               const std::vector<double>& T_grid, const std::vector<double>& p_list,
                               double alpha, int threads) {
  DynamicsReport rep;
  rep.T_grid = T_grid;
  rep.p_list = p_list;
  rep.alpha = alpha;
  rep.rows.resize(T_grid.size());

  parallel_for(
      T_grid.size(),
      [&](size_t i) {
        DynamicsRow& row = rep.rows[i];
        row.T = T_grid[i];
        const std::vector<double> a = abel_amplitudes(eig, row.T);
        for (double v : a) row.total_mass += v;
        row.boundary = boundary_mass(a, op);
        const double n_of_t = std::pow(row.T, 1.0 / (1.0 + alpha));
        row.n_of_t = n_of_t;
        row.guard_ok =
            row.boundary <= kBoundaryMassTol && n_of_t <= 0.5 * static_cast<double>(op.extent());
        row.moments.reserve(p_list.size());
        for (double p : p_list) row.moments.push_back(moment(a, op, p));
        if (row.guard_ok) {
          double pt = 0.0;
          for (index_t idx = 0; idx < op.size(); ++idx)
            if (static_cast<double>(std::abs(op.site_of(idx))) >= n_of_t)
              pt += a[static_cast<size_t>(idx)];
          row.p_t = pt;
        } else {
          row.p_t = std::numeric_limits<double>::quiet_NaN();
        }
      },
      threads);

  for (size_t ip = 0; ip < p_list.size(); ++ip) {
    std::vector<double> ms(T_grid.size());
    std::vector<bool> ok(T_grid.size());
    for (size_t i = 0; i < T_grid.size(); ++i) {
      ms[i] = rep.rows[i].moments[ip];
      ok[i] = rep.rows[i].guard_ok;
    }
    rep.fits.push_back(transport_exponent(T_grid, ms, ok, p_list[ip]));
  }
  return rep;
}

}  // namespace qdyn1d
