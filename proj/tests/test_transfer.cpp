#include <doctest.h>

#include <cmath>

#include "qdyn1d/transfer.hpp"

using namespace qdyn1d;

namespace {

struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  double uniform() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  index_t integer(index_t lo, index_t hi) {
    return lo + static_cast<index_t>(uniform() * static_cast<double>(hi - lo + 1));
  }
};

PotentialSamples random_potential(Rng& rng, index_t n, double lo, double hi) {
  PotentialSamples v;
  v.window = {0, n};
  v.values.resize(static_cast<size_t>(n) + 1);
  for (auto& x : v.values) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("step matrix entries") {
  const Mat2 t0 = step_matrix(0.0, 0.0);
  CHECK(t0.a == 0.0);
  CHECK(t0.b == -1.0);
  CHECK(t0.c == 1.0);
  CHECK(t0.d == 0.0);

  const Mat2 tb = step_matrix(2.0, 3.0);  // x=b, E=b+1
  CHECK(tb.a == 1.0);
  CHECK(tb.b == -1.0);

  CHECK(step_matrix(0.7, 0.7).a == 0.0);  // x=a, E=a
  CHECK(step_matrix(5.0, 5.0).det() == 1.0);
}

TEST_CASE("transfer product basics") {
  PotentialSamples v;
  v.window = {0, 2};
  v.values = {0.0, 0.7, 0.7};  // V(1) = V(2) = a
  const double a = 0.7;

  CHECK(max_abs_diff(transfer_product(v, 1, 1, 3.0), Mat2::identity()) == 0.0);

  // T(a,a)^2 = -I
  const Mat2 t2 = transfer_product(v, 2, 0, a);
  CHECK(max_abs_diff(t2, Mat2{-1, 0, 0, -1}) < 1e-15);

  // V = (b, a) at E0 = a: T(a)T(b) = ((-1, 0), (a-b, -1))
  PotentialSamples vba;
  vba.window = {0, 2};
  const double b = -0.4;
  vba.values = {0.0, b, a};
  const Mat2 p = transfer_product(vba, 2, 0, a);
  CHECK(p.a == -1.0);
  CHECK(p.b == 0.0);
  CHECK(p.c == a - b);
  CHECK(p.d == -1.0);
}

TEST_CASE("reverse products invert forward ones") {
  Rng rng(5);
  PotentialSamples v = random_potential(rng, 64, -0.5, 0.5);
  const double e = 0.3;
  const Mat2 fwd = transfer_product(v, 50, 10, e);
  const Mat2 rev = transfer_product(v, 10, 50, e);
  CHECK(max_abs_diff(fwd * rev, Mat2::identity()) < 1e-10);
}

TEST_CASE("out-of-window products are rejected") {
  PotentialSamples v;
  v.window = {1, 10};
  v.values.assign(10, 0.0);
  CHECK_THROWS_AS(transfer_product(v, 11, 0, 0.0), OutOfWindow);
}

TEST_CASE("free difference equation at band center is 4-periodic") {
  PotentialSamples v;
  v.window = {0, 16};
  v.values.assign(17, 0.0);
  const std::vector<double> phi = solve_difference(v, 0.0, 0, 0.0, 1.0, {0, 16});
  const double expected[] = {0, 1, 0, -1};
  for (index_t n = 0; n <= 16; ++n)
    CHECK(phi[static_cast<size_t>(n)] == doctest::Approx(expected[n % 4]).epsilon(1e-12));
}

TEST_CASE("solution columns reproduce the transfer matrix") {
  // Random draws in regimes where the comparison is resolvable in doubles
  // (norms <= ~1e3): short weak disorder, and special-energy block words
  // whose products grow at most linearly.
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    PotentialSamples v;
    double e = 0.0;
    index_t n_max = 0;
    if (trial % 2 == 0) {
      n_max = rng.integer(5, 40);
      v = random_potential(rng, n_max, -1.0, 1.0);
      e = rng.uniform(-2.0, 2.0);
    } else {
      n_max = rng.integer(64, 1000);
      const double a = rng.uniform(-1.0, 1.0);
      const double b = a + rng.uniform(0.3, 1.5);
      v.window = {0, n_max};
      v.values.resize(static_cast<size_t>(n_max) + 1, a);
      for (index_t i = 1; i <= n_max;) {  // isolated b's, odd a-runs
        i += 2 * rng.integer(0, 3) + 1;
        if (i <= n_max) v.at(i) = b;
        ++i;
      }
      e = a;
    }
    const std::vector<double> dirichlet = solve_difference(v, e, 0, 0.0, 1.0, {0, n_max});
    const std::vector<double> neumann = solve_difference(v, e, 0, 1.0, 0.0, {0, n_max});
    const index_t n = rng.integer(2, n_max - 1);
    const Mat2 t = transfer_product(v, n, 0, e);
    const double scale = std::max(1.0, t.op_norm());
    CHECK(std::abs(t.a - dirichlet[static_cast<size_t>(n + 1)]) / scale < 1e-10);
    CHECK(std::abs(t.c - dirichlet[static_cast<size_t>(n)]) / scale < 1e-10);
    CHECK(std::abs(t.b - neumann[static_cast<size_t>(n + 1)]) / scale < 1e-10);
    CHECK(std::abs(t.d - neumann[static_cast<size_t>(n)]) / scale < 1e-10);
  }
}

TEST_CASE("backward solving matches forward data") {
  Rng rng(29);
  PotentialSamples v = random_potential(rng, 40, -1.0, 1.0);
  const double e = 0.9;
  const std::vector<double> fwd = solve_difference(v, e, 0, 0.3, -1.1, {0, 40});
  // Re-solve anchored in the middle and compare.
  const std::vector<double> mid =
      solve_difference(v, e, 20, fwd[20], fwd[21], {0, 40});
  for (size_t i = 0; i < fwd.size(); ++i)
    CHECK(mid[i] == doctest::Approx(fwd[i]).epsilon(1e-9));
}

TEST_CASE("growth profile: constant potential at E = a is flat") {
  PotentialSamples v;
  v.window = {0, 4096};
  v.values.assign(4097, 1.2);
  const GrowthProfile prof = growth_profile(v, 1.2, 4096);
  for (double val : prof.sup_value) {
    CHECK(val >= 1.0 - 1e-12);     // unit determinant forces norm >= 1
    CHECK(val <= std::sqrt(2.0));  // powers of a rotation
  }
  const PowerLawFit fit = fit_power_law(prof);
  CHECK(std::abs(fit.alpha_hat) < 1e-6);
  // Monotone nondecreasing (running pair-sup).
  for (size_t i = 1; i < prof.sup_value.size(); ++i)
    CHECK(prof.sup_value[i] >= prof.sup_value[i - 1] - 1e-12);
}

TEST_CASE("fit_power_law recovers exact power laws") {
  GrowthProfile prof;
  for (index_t n = 1; n <= 4096; n *= 2) {
    prof.n.push_back(n);
    const double val = static_cast<double>(n) * static_cast<double>(n);
    prof.sup_value.push_back(val);
    prof.sup_log2.push_back(std::log2(val));
    prof.anchor_value.push_back(val);
    prof.anchor_log2.push_back(std::log2(val));
  }
  const PowerLawFit fit = fit_power_law(prof);
  CHECK(fit.alpha_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.c_hat == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_power_law requires four points") {
  GrowthProfile prof;
  for (index_t n : {1, 2, 4}) {
    prof.n.push_back(n);
    prof.sup_value.push_back(1.0);
    prof.sup_log2.push_back(0.0);
    prof.anchor_value.push_back(1.0);
    prof.anchor_log2.push_back(0.0);
  }
  CHECK_THROWS_AS(fit_power_law(prof), Error);
}

TEST_CASE("monodromy energies: translation covariance and symmetry") {
  const std::vector<double> base = monodromy_energies(0.0, 3);
  REQUIRE(base.size() == 2);
  CHECK(base[0] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(base[1] == doctest::Approx(1.0).epsilon(1e-10));

  const std::vector<double> shifted = monodromy_energies(5.0, 3);
  CHECK(shifted[0] == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(shifted[1] == doctest::Approx(6.0).epsilon(1e-10));

  const std::vector<double> five = monodromy_energies(0.0, 5);
  REQUIRE(five.size() == 4);
  for (size_t j = 0; j < five.size(); ++j)
    CHECK(five[j] == doctest::Approx(-five[five.size() - 1 - j]).epsilon(1e-10));

  CHECK_THROWS_AS(monodromy_energies(0.0, 4), Error);
  CHECK_THROWS_AS(monodromy_energies(0.0, 1), Error);
}

TEST_CASE("energy scan: rows line up with the grid") {
  PotentialSamples v;
  v.window = {0, 512};
  v.values.assign(513, 0.0);
  CHECK(energy_scan(v, std::vector<double>{}, 512).empty());

  const std::vector<double> grid = {0.0, 0.5, 1.0};
  const std::vector<ScanRow> rows = energy_scan(v, grid, 512);
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].energy == grid[i]);
    CHECK(rows[i].ok);
  }
  const PowerLawFit direct = fit_power_law(growth_profile(v, 0.5, 512));
  CHECK(rows[1].fit.alpha_hat == doctest::Approx(direct.alpha_hat));
}

TEST_CASE("sturmian energy scan: all fitted exponents finite") {
  PotentialSpec spec;
  spec.family = Family::Sturmian;
  spec.omega = RotationNumber::golden_mean();
  spec.coupling = 1.0;
  const index_t n_max = index_t{1} << 12;
  const PotentialSamples v = realize(spec, {0, n_max});
  // 50 energies across the spectrum window [-2, 2 + lambda].
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(-2.0 + 5.0 * i / 49.0);
  const std::vector<ScanRow> rows = energy_scan(v, grid, n_max);
  for (const ScanRow& row : rows) {
    CHECK(row.ok);
    CHECK(std::isfinite(row.fit.alpha_hat));
  }
}

TEST_CASE("cocycle identity on random draws") {
  Rng rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const index_t n = rng.integer(16, 512);
    PotentialSamples v = random_potential(rng, n, 0.0, 0.4);
    const double e = rng.uniform(-1.5, 1.5);
    const index_t l = rng.integer(0, n);
    const Mat2 whole = transfer_product(v, n, 0, e);
    const Mat2 upper = transfer_product(v, n, l, e);
    const Mat2 lower = transfer_product(v, l, 0, e);
    CHECK(max_abs_diff(upper * lower, whole) / whole.op_norm() < 1e-8);
  }
}

TEST_CASE("S1&S2 words collapse to signed parabolic powers at E0 = a") {
  Rng rng(4321);
  const double a = 0.25;
  const double b = -0.85;
  const double c = a - b;

  for (int trial = 0; trial < 100; ++trial) {
    // Random legal word: isolated b's with odd a-runs between them.
    std::string w;
    const index_t target = rng.integer(50, 2000);
    while (static_cast<index_t>(w.size()) < target) {
      w.append(static_cast<size_t>(2 * rng.integer(0, 3) + 1), 'a');
      w.push_back('b');
    }
    PotentialSamples v;
    v.window = {0, static_cast<index_t>(w.size())};
    v.values.resize(w.size() + 1, a);
    for (size_t i = 0; i < w.size(); ++i) v.values[i + 1] = w[i] == 'a' ? a : b;

    const Mat2 m = transfer_product(v, static_cast<index_t>(w.size()), 0, a);
    const Mat2 rot = step_matrix(a, a);  // the order-4 rotation
    const Mat2 candidates[4] = {m, m * rot, rot * m, rot * (m * rot)};

    // One of M, MA, AM, AMA must be +-(lower or upper) unipotent with
    // off-diagonal entry an integer multiple of (a-b).
    bool matched = false;
    for (const Mat2& cand : candidates) {
      for (double sign : {1.0, -1.0}) {
        const Mat2 s{sign * cand.a, sign * cand.b, sign * cand.c, sign * cand.d};
        const bool lower = std::abs(s.a - 1.0) < 1e-10 && std::abs(s.d - 1.0) < 1e-10 &&
                           std::abs(s.b) < 1e-10 &&
                           std::abs(s.c / c - std::round(s.c / c)) < 1e-10;
        const bool upper = std::abs(s.a - 1.0) < 1e-10 && std::abs(s.d - 1.0) < 1e-10 &&
                           std::abs(s.c) < 1e-10 &&
                           std::abs(s.b / c - std::round(s.b / c)) < 1e-10;
        matched = matched || lower || upper;
      }
    }
    CHECK(matched);
  }
}
