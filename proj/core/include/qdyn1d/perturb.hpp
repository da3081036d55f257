#pragma once

#include <cstdint>
#include <vector>

#include "qdyn1d/potentials.hpp"
#include "qdyn1d/transfer.hpp"

namespace qdyn1d {

enum class SignPattern { Deterministic, Alternating, SeededRandom };

/// Power-decaying perturbation |W(n)| = C2 (1 + |n|)^{-decay}. decay = 0 is
/// accepted but lies outside the stability hypotheses (within_hypothesis).
/// support_cutoff >= 0 zeroes W beyond |n| > cutoff (the finitely supported
/// special case).
struct PerturbationSpec {
  double c2 = 1.0;
  double decay = 4.0;
  SignPattern pattern = SignPattern::Deterministic;
  std::uint64_t seed = 1;
  index_t support_cutoff = -1;

  /// decay >= 1 + 2 alpha + eps for some eps > 0 is what stability needs.
  bool within_hypothesis(double alpha, double eps = 1e-9) const {
    return decay >= 1.0 + 2.0 * alpha + eps;
  }
};

PotentialSamples make_perturbation(const PerturbationSpec& spec, Window window);

/// Polar trace of one perturbed basic solution psi against the complex
/// reference phi = phi_D + i phi_N of the unperturbed equation: rho(n) is
/// recovered per site from the 2x2 linear system (psi(n), psi(n-1))^T =
/// Im[rho(n) (phi(n), phi(n-1))^T], never by an angle recursion, and the
/// residual is the defect of the exact update
///   R(n+1)^2 = R(n)^2 [1 + U sin(2 theta) + U^2 sin^2(theta)],
/// with U(n) = -2 W(n) |phi(n)|^2 / omega. Entries are indexed n = 1..n_max.
struct PruferTrace {
  std::vector<double> r;         // R(n) = |rho(n)|
  std::vector<double> u;         // U(n)
  std::vector<double> theta;     // arg rho(n) + arg phi(n)
  std::vector<double> residual;  // key-identity defect at n
  double max_residual = 0.0;
  double max_r_ratio = 1.0;      // max_n R(n) / R(1)
  double sum_abs_u = 0.0;
  double sum_u_sq = 0.0;
};

struct PruferPair {
  PruferTrace dirichlet;  // psi_D: psi(0)=0, psi(1)=1
  PruferTrace neumann;    // psi_N: psi(0)=1, psi(1)=0
  double omega = -2.0;    // Wronskian: 2 Im(phi(n+1) conj(phi(n)))
};

/// Trace both basic solutions of (V + W) at energy E on sites [1, n_max].
/// V and W windows must cover [1, n_max]. Internals run in extended
/// precision; the key identity is exact, so residuals are pure rounding.
PruferPair prufer_trace(const PotentialSamples& V, const PotentialSamples& W, double E,
                        index_t n_max);

struct StabilityReport {
  PowerLawFit unperturbed;
  PowerLawFit perturbed;
  double delta_alpha = 0.0;
  bool within_hypothesis = true;
};

/// Fit the norm-growth exponent at E0 for V and for V + W and compare; a
/// power-decaying W with decay > 1 + 2 alpha must not move the exponent.
StabilityReport stability_check(const PotentialSamples& V, const PotentialSamples& W, double E0,
                                index_t n_max, const PerturbationSpec* meta = nullptr);

}  // namespace qdyn1d
