#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qdyn1d/errors.hpp"

namespace qdyn1d {

using index_t = std::int64_t;

/// Closed integer interval [lo, hi].
struct Window {
  index_t lo = 0;
  index_t hi = 0;

  index_t length() const { return hi - lo + 1; }
  bool contains(index_t n) const { return n >= lo && n <= hi; }
  bool contains(const Window& w) const { return w.lo >= lo && w.hi <= hi; }
};

/// Realized potential values V(n) on an index window.
struct PotentialSamples {
  Window window;
  std::vector<double> values;

  double operator[](index_t n) const { return values[static_cast<size_t>(n - window.lo)]; }
  double& at(index_t n) { return values[static_cast<size_t>(n - window.lo)]; }
};

enum class Family { Substitution, Sturmian, Prime, Sparse, Hierarchical, Explicit };
enum class Geometry { HalfLine, WholeLine };

/// Two-letter substitution rule over {a, b}. The fixed point is generated by
/// iterating from `seed`, which requires image_of(seed) to begin with seed.
struct SubstitutionRule {
  std::string image_a = "ab";
  std::string image_b = "aa";
  char seed = 'a';

  const std::string& image(char s) const { return s == 'a' ? image_a : image_b; }
};

SubstitutionRule period_doubling_rule();
SubstitutionRule fibonacci_rule();
SubstitutionRule thue_morse_rule();
/// S(a) = a^{2k-1} b, S(b) = a^{2l}: words with isolated b's and odd a-blocks.
SubstitutionRule odd_block_rule(int k, int l);
/// S(a) = a^{2k} b, S(b) = a^{2l}: words with even a-blocks.
SubstitutionRule even_block_rule(int k, int l);
/// S(a) = a^m b^n, S(b) = a (generalized Fibonacci).
SubstitutionRule generalized_fibonacci_rule(int m, int n);
/// S(a) = a^m b^n, S(b) = b^n a^m (generalized Thue-Morse).
SubstitutionRule generalized_thue_morse_rule(int m, int n);

/// Rotation number for the Sturmian family. Quadratic surds (sqrt(d)-p)/q are
/// kept exact so that continued fractions and circle-map symbols can be
/// evaluated in integer arithmetic; otherwise a plain double is used.
struct RotationNumber {
  bool is_surd = false;
  std::int64_t d = 0, p = 0, q = 1;  // (sqrt(d) - p) / q
  double approx = 0.0;

  double value() const;
  static RotationNumber golden_mean();   // (sqrt(5)-1)/2
  static RotationNumber silver_mean();   // sqrt(2)-1
  static RotationNumber surd(std::int64_t d, std::int64_t p, std::int64_t q);
  static RotationNumber decimal(double omega);
};

struct PotentialSpec {
  Family family = Family::Substitution;
  Geometry geometry = Geometry::HalfLine;

  double level_a = 0.0;         // value "a" of two-valued families
  double level_b = 1.0;         // value "b"
  double coupling = 1.0;        // lambda

  SubstitutionRule rule;        // Substitution
  RotationNumber omega = RotationNumber::golden_mean();  // Sturmian
  double theta = 0.0;           // Sturmian phase
  int gamma = 2;                // Sparse: bumps at gamma^k
  double ratio = 1.0;           // Hierarchical R
  double v_origin = 0.0;        // Hierarchical V(0) convention (ord 0 undefined)
  std::vector<double> explicit_values;  // Explicit, indexed from explicit_lo
  index_t explicit_lo = 1;

  index_t max_window = index_t{1} << 26;

  std::string label() const;
};

/// First `length` symbols of the one-sided fixed point u = lim S^k(seed).
/// If the rule stops growing (e.g. the identity rule), the finite fixed word
/// is extended periodically.
std::string subst_fixed_point(const SubstitutionRule& rule, index_t length);

/// Realize V(n) for n in `window` according to the family formula.
PotentialSamples realize(const PotentialSpec& spec, Window window);

/// Number of factors 2 in n (n != 0).
int ord2(index_t n);
/// Hierarchical level profile f(m) = sum_{k<m} R^k (f(0) = 0).
double hier_profile(int m, double R);
bool is_prime(index_t n);
/// Sturmian symbol chi_[1-omega,1)(n*omega + theta mod 1) in {0,1}.
int sturmian_symbol(const RotationNumber& omega, double theta, index_t n);

enum class StructureCondition { S1, S2, S3, S4 };

struct StructureReport {
  bool holds = true;
  index_t first_violation = -1;  // 1-based site index, -1 if none
};

/// Check one of the block-structure conditions on word[from_index..] using
/// 1-based indexing. Only interior blocks (delimited on both sides within the
/// suffix) are tested; truncated leading/trailing blocks are window artifacts.
/// For S4 pass the odd multiplicity parameter k >= 3.
StructureReport check_structure(std::string_view word, StructureCondition cond,
                                index_t from_index, int k = 3);

enum class GrowthClass { Bounded, Linear };

struct SpecialEnergy {
  double energy = 0.0;
  GrowthClass growth = GrowthClass::Linear;
};

/// Special energies with known transfer-matrix growth class for two-valued
/// families whose word structure is recognized among (S1&S2), (S3), (S4).
std::vector<SpecialEnergy> special_energies(const PotentialSpec& spec);

}  // namespace qdyn1d
