#include <doctest.h>

#include <cmath>
#include <set>

#include "qdyn1d/potentials.hpp"

using namespace qdyn1d;

TEST_CASE("period doubling fixed point matches the known prefix") {
  CHECK(subst_fixed_point(period_doubling_rule(), 18) == "abaaabababaaabaaab");
}

TEST_CASE("identity rule extends periodically") {
  SubstitutionRule id{"a", "b", 'a'};
  CHECK(subst_fixed_point(id, 3) == "aaa");
}

TEST_CASE("fibonacci fixed point: four iterations from a") {
  // a -> ab -> aba -> abaab -> abaababa, truncated to 8.
  CHECK(subst_fixed_point(fibonacci_rule(), 8) == "abaababa");
}

TEST_CASE("fixed point self-consistency: shorter prefixes embed in longer ones") {
  for (const SubstitutionRule& rule :
       {period_doubling_rule(), fibonacci_rule(), thue_morse_rule(), odd_block_rule(2, 1),
        even_block_rule(1, 2), generalized_fibonacci_rule(1, 3)}) {
    const std::string shorter = subst_fixed_point(rule, 40);
    const std::string longer = subst_fixed_point(rule, 163);
    CHECK(longer.substr(0, 40) == shorter);
  }
}

TEST_CASE("invalid rules are rejected") {
  CHECK_THROWS_AS(subst_fixed_point({"ba", "aa", 'a'}, 5), NonPrefixRule);
  CHECK_THROWS_AS(subst_fixed_point({"ab", "", 'a'}, 5), InvalidRule);
}

TEST_CASE("sturmian golden mean, zero phase, window [1,8]") {
  PotentialSpec spec;
  spec.family = Family::Sturmian;
  spec.omega = RotationNumber::golden_mean();
  spec.theta = 0.0;
  spec.coupling = 1.0;
  const PotentialSamples v = realize(spec, {1, 8});
  const double expected[] = {1, 0, 1, 1, 0, 1, 0, 1};
  for (index_t n = 1; n <= 8; ++n) CHECK(v[n] == expected[n - 1]);
}

TEST_CASE("prime potential on [1,4]") {
  PotentialSpec spec;
  spec.family = Family::Prime;
  spec.level_a = 0.0;
  spec.level_b = 1.0;
  const PotentialSamples v = realize(spec, {1, 4});
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 1.0);
  CHECK(v[3] == 1.0);
  CHECK(v[4] == 0.0);
}

TEST_CASE("hierarchical profile: V(4) = lambda (1 + R)") {
  PotentialSpec spec;
  spec.family = Family::Hierarchical;
  spec.coupling = 1.0;
  spec.ratio = 2.0;
  const PotentialSamples v = realize(spec, {1, 8});
  CHECK(v[4] == doctest::Approx(3.0));  // ord 4 = 2, f(2) = 1 + R
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 1.0);
  CHECK(v[8] == doctest::Approx(7.0));  // f(3) = 1 + 2 + 4
}

TEST_CASE("hierarchical V(0) convention is configurable") {
  PotentialSpec spec;
  spec.family = Family::Hierarchical;
  PotentialSamples v = realize(spec, {-2, 2});
  CHECK(v[0] == 0.0);
  spec.v_origin = 7.5;
  v = realize(spec, {-2, 2});
  CHECK(v[0] == 7.5);
}

TEST_CASE("window guard") {
  PotentialSpec spec;
  spec.family = Family::Prime;
  spec.max_window = 100;
  CHECK_THROWS_AS(realize(spec, {1, 1000}), WindowTooLarge);
}

TEST_CASE("sturmian symbol frequency approaches omega (bounded remainder)") {
  const index_t n_sites = 100000;
  for (double theta : {0.0, 0.3, 0.777}) {
    PotentialSpec spec;
    spec.family = Family::Sturmian;
    spec.omega = RotationNumber::golden_mean();
    spec.theta = theta;
    spec.coupling = 1.0;
    const PotentialSamples v = realize(spec, {1, n_sites});
    double ones = 0.0;
    for (index_t n = 1; n <= n_sites; ++n) ones += v[n];
    const double freq = ones / static_cast<double>(n_sites);
    CHECK(std::abs(freq - spec.omega.value()) < 2.0 / static_cast<double>(n_sites));
  }
}

TEST_CASE("prime and sparse generators agree with independent enumerations") {
  const index_t top = 100000;

  PotentialSpec prime;
  prime.family = Family::Prime;
  const PotentialSamples vp = realize(prime, {1, top});
  // Independent sieve of Eratosthenes, written separately from realize().
  std::vector<bool> is_p(static_cast<size_t>(top) + 1, true);
  is_p[0] = is_p[1] = false;
  for (index_t i = 2; i <= top; ++i)
    if (is_p[static_cast<size_t>(i)])
      for (index_t j = 2 * i; j <= top; j += i) is_p[static_cast<size_t>(j)] = false;
  for (index_t n = 1; n <= top; ++n)
    CHECK(vp[n] == (is_p[static_cast<size_t>(n)] ? 1.0 : 0.0));

  PotentialSpec sparse;
  sparse.family = Family::Sparse;
  sparse.gamma = 3;
  const PotentialSamples vs = realize(sparse, {1, top});
  std::set<index_t> powers;
  for (index_t p = 3; p <= top; p *= 3) powers.insert(p);
  for (index_t n = 1; n <= top; ++n)
    CHECK(vs[n] == (powers.count(n) ? 1.0 : 0.0));
}

TEST_CASE("hierarchical symmetries V(l 2^m + k) = V(k) = V(-k)") {
  PotentialSpec spec;
  spec.family = Family::Hierarchical;
  spec.coupling = 1.3;
  spec.ratio = 2.7;
  const index_t top = 51 * 8192 + 8192;
  const PotentialSamples v = realize(spec, {-top, top});

  std::uint64_t state = 99;
  auto rnd = [&state](index_t lo, index_t hi) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return lo + static_cast<index_t>((state >> 33) % static_cast<std::uint64_t>(hi - lo + 1));
  };
  for (int trial = 0; trial < 500; ++trial) {
    const int m = static_cast<int>(rnd(1, 13));
    const index_t l = rnd(1, 50);
    index_t k = rnd(1, (index_t{1} << m) - 1);
    if (rnd(0, 1)) k = -k;
    CHECK(v[l * (index_t{1} << m) + k] == v[k]);
    CHECK(v[k] == v[-k]);
  }
}

TEST_CASE("structure conditions on the period doubling word") {
  const std::string w = subst_fixed_point(period_doubling_rule(), 10000);
  CHECK(check_structure(w, StructureCondition::S1, 1).holds);
  CHECK(check_structure(w, StructureCondition::S2, 1).holds);
  CHECK_FALSE(check_structure(w, StructureCondition::S3, 1).holds);
}

TEST_CASE("S1 violation is reported at the first bad site") {
  const StructureReport rep = check_structure("abba", StructureCondition::S1, 1);
  CHECK_FALSE(rep.holds);
  CHECK(rep.first_violation == 2);
}

TEST_CASE("even-block substitution words satisfy S3") {
  const std::string w = subst_fixed_point(even_block_rule(1, 1), 8192);
  CHECK(check_structure(w, StructureCondition::S3, 1).holds);
  CHECK_FALSE(check_structure(w, StructureCondition::S2, 1).holds);
}

TEST_CASE("nickel-mean word satisfies S4 with k = 3") {
  const std::string w = subst_fixed_point(generalized_fibonacci_rule(1, 3), 8192);
  CHECK(check_structure(w, StructureCondition::S4, 1, 3).holds);
  CHECK_FALSE(check_structure(w, StructureCondition::S1, 1).holds);
  CHECK_THROWS_AS(check_structure(w, StructureCondition::S4, 1, 4), Error);
}

TEST_CASE("prime and sparse words satisfy S1, S2 beyond their thresholds") {
  for (Family fam : {Family::Prime, Family::Sparse}) {
    PotentialSpec spec;
    spec.family = fam;
    const PotentialSamples v = realize(spec, {1, 10000});
    std::string w;
    for (index_t n = 1; n <= 10000; ++n) w += v[n] == 0.0 ? 'a' : 'b';
    const index_t from = fam == Family::Prime ? 4 : 1;
    CHECK(check_structure(w, StructureCondition::S1, from).holds);
    CHECK(check_structure(w, StructureCondition::S2, from).holds);
  }
}

TEST_CASE("trailing truncated blocks are ignored") {
  // "abaa": the final 'aa' has no right delimiter; S2 must not flag it.
  CHECK(check_structure("abaa", StructureCondition::S2, 1).holds);
  // But an interior even block still fails.
  CHECK_FALSE(check_structure("abaab", StructureCondition::S2, 1).holds);
}

TEST_CASE("empty suffix is vacuously true") {
  CHECK(check_structure("ab", StructureCondition::S1, 3).holds);
}

TEST_CASE("special energies: period doubling") {
  PotentialSpec spec;
  spec.family = Family::Substitution;
  spec.rule = period_doubling_rule();
  spec.level_a = 0.0;
  spec.level_b = 1.0;
  const auto es = special_energies(spec);
  REQUIRE(es.size() == 1);
  CHECK(es[0].energy == 0.0);
  CHECK(es[0].growth == GrowthClass::Linear);
}

TEST_CASE("special energies: S3 family classification by |a-b|") {
  PotentialSpec spec;
  spec.family = Family::Substitution;
  spec.rule = even_block_rule(1, 1);
  spec.level_a = 0.0;

  spec.level_b = 1.0;
  auto es = special_energies(spec);
  REQUIRE(es.size() == 1);
  CHECK(es[0].energy == 0.0);
  CHECK(es[0].growth == GrowthClass::Bounded);

  spec.level_b = 2.0;
  es = special_energies(spec);
  REQUIRE(es.size() == 1);
  CHECK(es[0].growth == GrowthClass::Linear);

  spec.level_b = 3.0;
  CHECK(special_energies(spec).empty());
}

TEST_CASE("special energies: S4 ladder for the nickel mean") {
  PotentialSpec spec;
  spec.family = Family::Substitution;
  spec.rule = generalized_fibonacci_rule(1, 3);
  spec.level_a = 0.0;
  spec.level_b = 0.0;  // b = 0: ladder at +-1
  const auto es = special_energies(spec);
  REQUIRE(es.size() == 2);
  CHECK(es[0].energy == doctest::Approx(-1.0));
  CHECK(es[1].energy == doctest::Approx(1.0));
}

TEST_CASE("special energies: prime model inherits the S1&S2 class") {
  PotentialSpec spec;
  spec.family = Family::Prime;
  spec.level_a = 0.5;
  spec.level_b = 2.0;
  const auto es = special_energies(spec);
  REQUIRE(es.size() == 1);
  CHECK(es[0].energy == 0.5);
  CHECK(es[0].growth == GrowthClass::Linear);
}

TEST_CASE("special energies: unrecognized structure raises") {
  PotentialSpec spec;
  spec.family = Family::Sturmian;
  CHECK_THROWS_AS(special_energies(spec), NoKnownSpecialEnergy);
}
