#include "qdyn1d/perturb.hpp"

#include <cmath>

namespace qdyn1d {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Kahan's algorithm for a*b - c*d: the fma cancels the rounding of the
// pivot product, so the result is accurate to ~1.5 ulp of the true value
// even under heavy cancellation. The per-site rho recovery subtracts
// products of order |psi||phi| ~ n^{2 alpha} to get an O(1) answer, so the
// naive expression would lose ~n^{2 alpha} eps absolutely.
long double diff_of_products(long double a, long double b, long double c, long double d) {
  const long double w = c * d;
  const long double e = std::fmal(c, d, -w);
  const long double f = std::fmal(a, b, -w);
  return f - e;
}

struct Complexl {
  long double re = 0.0L, im = 0.0L;
};

}  // namespace

PotentialSamples make_perturbation(const PerturbationSpec& spec, Window window) {
  if (spec.decay < 0.0) throw Error("make_perturbation: decay must be >= 0");
  PotentialSamples w;
  w.window = window;
  w.values.resize(static_cast<size_t>(window.length()));

  for (index_t n = window.lo; n <= window.hi; ++n) {
    double sign = 1.0;
    switch (spec.pattern) {
      case SignPattern::Deterministic:
        break;
      case SignPattern::Alternating:
        sign = (n % 2 == 0) ? 1.0 : -1.0;
        break;
      case SignPattern::SeededRandom: {
        std::uint64_t s = spec.seed + 0x632be59bd9b4e019ull * static_cast<std::uint64_t>(n - window.lo);
        sign = (splitmix64(s) & 1u) ? 1.0 : -1.0;
        break;
      }
    }
    double mag = spec.c2 * std::pow(1.0 + std::abs(static_cast<double>(n)), -spec.decay);
    if (spec.support_cutoff >= 0 && std::abs(n) > spec.support_cutoff) mag = 0.0;
    w.at(n) = sign * mag;
  }
  return w;
}

PruferPair prufer_trace(const PotentialSamples& V, const PotentialSamples& W, double E,
                        index_t n_max) {
  if (n_max < 1) throw Error("prufer_trace: n_max must be >= 1");
  if (!V.window.contains(Window{1, n_max}) || !W.window.contains(Window{1, n_max}))
    throw OutOfWindow("prufer_trace: V and W must cover sites [1, n_max]");

  const auto len = static_cast<size_t>(n_max) + 2;

  // Reference solution phi = phi_D + i phi_N of the unperturbed equation,
  // with the same initial values as the perturbed basic solutions.
  std::vector<long double> phi_re(len), phi_im(len);
  phi_re[0] = 0.0L;  // phi_D
  phi_re[1] = 1.0L;
  phi_im[0] = 1.0L;  // phi_N
  phi_im[1] = 0.0L;
  const auto el = static_cast<long double>(E);
  for (index_t n = 1; n <= n_max; ++n) {
    const long double c = el - static_cast<long double>(V[n]);
    phi_re[static_cast<size_t>(n) + 1] = c * phi_re[static_cast<size_t>(n)] - phi_re[static_cast<size_t>(n) - 1];
    phi_im[static_cast<size_t>(n) + 1] = c * phi_im[static_cast<size_t>(n)] - phi_im[static_cast<size_t>(n) - 1];
  }

  // Wronskian 2 Im(phi(n+1) conj(phi(n))); constant (= -2 for these seeds).
  auto local_omega = [&](index_t n) {
    return 2.0L * diff_of_products(phi_im[static_cast<size_t>(n) + 1], phi_re[static_cast<size_t>(n)],
                                   phi_re[static_cast<size_t>(n) + 1], phi_im[static_cast<size_t>(n)]);
  };
  const long double omega0 = local_omega(0);
  if (std::abs(static_cast<double>(omega0)) < 1e-12)
    throw DegenerateReference("prufer_trace: reference solution has vanishing Wronskian");

  auto trace_one = [&](double psi0, double psi1) {
    std::vector<long double> psi(len);
    psi[0] = static_cast<long double>(psi0);
    psi[1] = static_cast<long double>(psi1);
    for (index_t n = 1; n <= n_max; ++n) {
      const long double c = el - static_cast<long double>(V[n]) - static_cast<long double>(W[n]);
      psi[static_cast<size_t>(n) + 1] = c * psi[static_cast<size_t>(n)] - psi[static_cast<size_t>(n) - 1];
    }

    // rho(n) = (2/omega) [psi(n) conj(phi(n-1)) - psi(n-1) conj(phi(n))],
    // using the local Wronskian of the computed reference.
    auto rho_at = [&](index_t n) {
      const auto i = static_cast<size_t>(n);
      const long double om = local_omega(n - 1);
      Complexl rho;
      rho.re = 2.0L / om * diff_of_products(psi[i], phi_re[i - 1], psi[i - 1], phi_re[i]);
      rho.im = -2.0L / om * diff_of_products(psi[i], phi_im[i - 1], psi[i - 1], phi_im[i]);
      return rho;
    };

    PruferTrace tr;
    tr.r.resize(static_cast<size_t>(n_max));
    tr.u.resize(static_cast<size_t>(n_max));
    tr.theta.resize(static_cast<size_t>(n_max));
    tr.residual.resize(static_cast<size_t>(n_max));

    Complexl rho = rho_at(1);
    for (index_t n = 1; n <= n_max; ++n) {
      const auto i = static_cast<size_t>(n);
      const Complexl rho_next = rho_at(n + 1);

      const long double r2 = rho.re * rho.re + rho.im * rho.im;
      const long double r2_next = rho_next.re * rho_next.re + rho_next.im * rho_next.im;
      const long double abs_phi2 = phi_re[i] * phi_re[i] + phi_im[i] * phi_im[i];

      const long double om = local_omega(n);
      const long double uu = -2.0L * static_cast<long double>(W[n]) * abs_phi2 / om;

      // theta enters only through sin/cos of arg(rho phi); take them from
      // the components instead of transcendentals of large arguments.
      const long double zr = rho.re * phi_re[i] - rho.im * phi_im[i];
      const long double zi = rho.re * phi_im[i] + rho.im * phi_re[i];
      const long double zmod = std::sqrt(zr * zr + zi * zi);
      const long double sin_t = zmod > 0.0L ? zi / zmod : 0.0L;
      const long double cos_t = zmod > 0.0L ? zr / zmod : 1.0L;

      const long double rhs = r2 * (1.0L + uu * 2.0L * sin_t * cos_t + uu * uu * sin_t * sin_t);

      tr.r[i - 1] = static_cast<double>(std::sqrt(r2));
      tr.u[i - 1] = static_cast<double>(uu);
      tr.theta[i - 1] = static_cast<double>(std::atan2(zi, zr));
      tr.residual[i - 1] = static_cast<double>(std::abs(r2_next - rhs));
      tr.sum_abs_u += std::abs(tr.u[i - 1]);
      tr.sum_u_sq += tr.u[i - 1] * tr.u[i - 1];

      rho = rho_next;
    }

    tr.max_residual = 0.0;
    double max_r = 0.0;
    for (double v : tr.residual) tr.max_residual = std::max(tr.max_residual, v);
    for (double v : tr.r) max_r = std::max(max_r, v);
    tr.max_r_ratio = max_r / tr.r.front();
    return tr;
  };

  PruferPair pair;
  pair.omega = static_cast<double>(omega0);
  pair.dirichlet = trace_one(0.0, 1.0);
  pair.neumann = trace_one(1.0, 0.0);
  return pair;
}

StabilityReport stability_check(const PotentialSamples& V, const PotentialSamples& W, double E0,
                                index_t n_max, const PerturbationSpec* meta) {
  if (!V.window.contains(Window{1, n_max}) || !W.window.contains(Window{1, n_max}))
    throw OutOfWindow("stability_check: V and W must cover sites [1, n_max]");

  PotentialSamples sum;
  sum.window = {1, n_max};
  sum.values.resize(static_cast<size_t>(n_max));
  for (index_t n = 1; n <= n_max; ++n) sum.at(n) = V[n] + W[n];

  StabilityReport rep;
  rep.unperturbed = fit_power_law(growth_profile(V, E0, n_max));
  rep.perturbed = fit_power_law(growth_profile(sum, E0, n_max));
  rep.delta_alpha = std::abs(rep.perturbed.alpha_hat - rep.unperturbed.alpha_hat);
  if (meta) rep.within_hypothesis = meta->within_hypothesis(rep.unperturbed.alpha_hat);
  return rep;
}

}  // namespace qdyn1d
