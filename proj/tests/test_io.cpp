#include <doctest.h>

#include "qdyn1d/csv.hpp"
#include "qdyn1d/json_io.hpp"

using namespace qdyn1d;

TEST_CASE("potential spec JSON round trips") {
  PotentialSpec st;
  st.family = Family::Sturmian;
  st.omega = RotationNumber::golden_mean();
  st.theta = 0.25;
  st.coupling = 1.5;
  PotentialSpec st2 = spec_from_json(spec_to_json(st));
  CHECK(st2.family == Family::Sturmian);
  CHECK(st2.omega.is_surd);
  CHECK(st2.omega.d == 5);
  CHECK(st2.theta == 0.25);
  CHECK(st2.coupling == 1.5);

  PotentialSpec sub;
  sub.family = Family::Substitution;
  sub.rule = generalized_fibonacci_rule(2, 3);
  sub.level_a = -0.5;
  sub.level_b = 0.5;
  PotentialSpec sub2 = spec_from_json(spec_to_json(sub));
  CHECK(sub2.rule.image_a == "aabbb");
  CHECK(sub2.rule.image_b == "a");
  CHECK(sub2.level_a == -0.5);

  PotentialSpec hier;
  hier.family = Family::Hierarchical;
  hier.ratio = 2.5;
  hier.v_origin = 0.3;
  PotentialSpec hier2 = spec_from_json(spec_to_json(hier));
  CHECK(hier2.ratio == 2.5);
  CHECK(hier2.v_origin == 0.3);

  // The realized values agree, not just the fields.
  const PotentialSamples v1 = realize(hier, {-32, 32});
  const PotentialSamples v2 = realize(hier2, {-32, 32});
  for (index_t n = -32; n <= 32; ++n) CHECK(v1[n] == v2[n]);
}

TEST_CASE("unknown keys are rejected with the key name") {
  nlohmann::json j = {{"family", "prime"}, {"couplngg", 2.0}};
  try {
    spec_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("couplngg") != std::string::npos);
  }
}

TEST_CASE("named rules and rotation numbers parse") {
  nlohmann::json j = {{"family", "substitution"}, {"rule", "period-doubling"}};
  CHECK(spec_from_json(j).rule.image_a == "ab");
  nlohmann::json j2 = {{"family", "sturmian"}, {"omega", "silver"}};
  CHECK(spec_from_json(j2).omega.d == 2);
  nlohmann::json j3 = {{"family", "sturmian"}, {"omega", 0.37}};
  CHECK(spec_from_json(j3).omega.approx == 0.37);
}

TEST_CASE("csv number formatting is deterministic shortest round-trip") {
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-3.0) == "-3");
  CHECK(format_double(1e-9) == "1e-09");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
