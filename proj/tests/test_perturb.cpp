#include <doctest.h>

#include <cmath>

#include "qdyn1d/perturb.hpp"

using namespace qdyn1d;

namespace {

PotentialSamples pd_samples(index_t n_max) {
  PotentialSpec spec;
  spec.family = Family::Substitution;
  spec.rule = period_doubling_rule();
  return realize(spec, {0, n_max});
}

PotentialSamples zero_samples(index_t n_max) {
  PotentialSamples w;
  w.window = {0, n_max};
  w.values.assign(static_cast<size_t>(n_max) + 1, 0.0);
  return w;
}

}  // namespace

TEST_CASE("perturbation values and patterns") {
  PerturbationSpec spec;
  spec.c2 = 1.0;
  spec.decay = 4.0;
  const PotentialSamples w = make_perturbation(spec, {0, 10});
  CHECK(w[1] == doctest::Approx(1.0 / 16.0));
  CHECK(w[2] == doctest::Approx(1.0 / 81.0));

  PerturbationSpec alt = spec;
  alt.pattern = SignPattern::Alternating;
  const PotentialSamples wa = make_perturbation(alt, {0, 10});
  CHECK(wa[1] == doctest::Approx(-1.0 / 16.0));
  CHECK(wa[2] == doctest::Approx(1.0 / 81.0));

  PerturbationSpec rnd = spec;
  rnd.pattern = SignPattern::SeededRandom;
  rnd.seed = 42;
  const PotentialSamples w1 = make_perturbation(rnd, {0, 100});
  const PotentialSamples w2 = make_perturbation(rnd, {0, 100});
  for (index_t n = 0; n <= 100; ++n) CHECK(w1[n] == w2[n]);

  PerturbationSpec fin = spec;
  fin.support_cutoff = 5;
  const PotentialSamples wf = make_perturbation(fin, {0, 10});
  CHECK(wf[5] != 0.0);
  CHECK(wf[6] == 0.0);

  // decay = 0 is accepted but flagged outside the stability hypotheses.
  PerturbationSpec flat_w = spec;
  flat_w.decay = 0.0;
  CHECK_NOTHROW(make_perturbation(flat_w, {0, 10}));
  CHECK_FALSE(flat_w.within_hypothesis(1.0));
  CHECK(spec.within_hypothesis(1.0));  // 4 > 1 + 2*1
}

TEST_CASE("unperturbed trace: constant R, vanishing residuals, omega = -2") {
  const index_t n_max = 4096;
  const PotentialSamples v = pd_samples(n_max);
  const PruferPair pair = prufer_trace(v, zero_samples(n_max), 0.0, n_max);

  CHECK(pair.omega == -2.0);
  for (const PruferTrace* tr : {&pair.dirichlet, &pair.neumann}) {
    CHECK(tr->max_residual < 1e-12);
    CHECK(std::abs(tr->max_r_ratio - 1.0) < 1e-10);
    for (double u : tr->u) CHECK(u == 0.0);
  }
  CHECK(pair.dirichlet.r.front() == doctest::Approx(1.0));
}

TEST_CASE("reconstruction identity psi(n) = Im(rho(n) phi(n))") {
  const index_t n_max = 2048;
  const PotentialSamples v = pd_samples(n_max);
  PerturbationSpec w_spec;
  w_spec.decay = 4.0;
  const PotentialSamples w = make_perturbation(w_spec, {0, n_max});
  const PruferPair pair = prufer_trace(v, w, 0.0, n_max);

  // Recompute phi and psi_D with plain double recursions and compare
  // R(n) |phi(n)| sin(theta(n)) against psi_D(n).
  std::vector<double> phi_d(n_max + 2), phi_n(n_max + 2), psi(n_max + 2);
  phi_d[0] = 0.0;
  phi_d[1] = 1.0;
  phi_n[0] = 1.0;
  phi_n[1] = 0.0;
  psi[0] = 0.0;
  psi[1] = 1.0;
  for (index_t n = 1; n < n_max + 1; ++n) {
    phi_d[n + 1] = -v[n] * phi_d[n] - phi_d[n - 1];
    phi_n[n + 1] = -v[n] * phi_n[n] - phi_n[n - 1];
    psi[n + 1] = (-v[n] - w[n]) * psi[n] - psi[n - 1];
  }
  for (index_t n = 1; n <= n_max; ++n) {
    const double abs_phi = std::hypot(phi_d[n], phi_n[n]);
    const double rec = pair.dirichlet.r[n - 1] * abs_phi * std::sin(pair.dirichlet.theta[n - 1]);
    CHECK(std::abs(rec - psi[n]) <= 1e-10 * std::max(1.0, std::abs(psi[n])));
  }
}

TEST_CASE("key identity residuals and R boundedness on period doubling") {
  const index_t n_max = index_t{1} << 12;
  const PotentialSamples v = pd_samples(n_max);
  PerturbationSpec w_spec;
  w_spec.decay = 4.0;
  const PotentialSamples w = make_perturbation(w_spec, {0, n_max});
  const PruferPair pair = prufer_trace(v, w, 0.0, n_max);

  for (const PruferTrace* tr : {&pair.dirichlet, &pair.neumann}) {
    CHECK(tr->max_residual < 1e-10);
    // Summability of U gives the multiplicative bound
    // max R <= R(1) exp(sum |U| + sum U^2).
    const double bound = tr->r.front() * std::exp(tr->sum_abs_u + tr->sum_u_sq) + 1e-6;
    for (double rv : tr->r) CHECK(rv <= bound);
  }
}

TEST_CASE("degenerate windows are rejected") {
  const PotentialSamples v = pd_samples(64);
  CHECK_THROWS_AS(prufer_trace(v, zero_samples(8), 0.0, 64), OutOfWindow);
}

TEST_CASE("stability of the fitted exponent: period doubling, decay 4") {
  const index_t n_fit = index_t{1} << 14;
  const PotentialSamples v = pd_samples(n_fit);
  PerturbationSpec w_spec;
  w_spec.decay = 4.0;
  const PotentialSamples w = make_perturbation(w_spec, {0, n_fit});
  const StabilityReport rep = stability_check(v, w, 0.0, n_fit, &w_spec);
  CHECK(rep.delta_alpha < 0.2);
  CHECK(rep.within_hypothesis);  // 4 >= 1 + 2*alpha for alpha ~ 1

  const StabilityReport trivial = stability_check(v, zero_samples(n_fit), 0.0, n_fit);
  CHECK(trivial.delta_alpha == 0.0);
}

TEST_CASE("stability at the hierarchical gap edge, R = 4, decay 5.5") {
  PotentialSpec spec;
  spec.family = Family::Hierarchical;
  spec.coupling = 1.0;
  spec.ratio = 4.0;
  const index_t n_fit = index_t{1} << 14;
  const PotentialSamples v = realize(spec, {0, n_fit});
  PerturbationSpec w_spec;
  w_spec.decay = 5.5;  // 1 + 2*alpha + eps with alpha = log2(4) = 2
  const PotentialSamples w = make_perturbation(w_spec, {0, n_fit});
  const StabilityReport rep = stability_check(v, w, 0.0, n_fit, &w_spec);
  CHECK(rep.delta_alpha < 0.2);
  CHECK(rep.within_hypothesis);
}
