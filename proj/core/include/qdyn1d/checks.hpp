#pragma once

#include <string>
#include <vector>

namespace qdyn1d {

/// Outcome of one verification criterion: measured values against the pinned
/// thresholds, plus wall time.
struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

/// Exact matrix identities, determinant/cocycle contracts, monodromy counts,
/// trace-map cascade.
std::vector<CheckResult> run_identity_checks();

/// Dual-route oracles: trace map vs direct products, Abel closed form vs time
/// quadrature and the Parseval energy route, circle map vs substitution word,
/// continued-fraction values.
std::vector<CheckResult> run_oracle_checks();

/// Scaling and dynamical bounds: growth exponents, ballistic control, the
/// desk-scale moment bounds, the single-energy scaling harness, stability
/// under power-decaying perturbations. The heavy checks; several minutes.
std::vector<CheckResult> run_bound_checks();

/// All criteria in order (identities + oracles + bounds).
std::vector<CheckResult> run_acceptance();

}  // namespace qdyn1d
