#include "qdyn1d/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace qdyn1d {

namespace {

void validate_rule(const SubstitutionRule& rule) {
  if (rule.image_a.empty() || rule.image_b.empty())
    throw InvalidRule("substitution rule has an erasing image");
  for (const std::string* img : {&rule.image_a, &rule.image_b})
    for (char ch : *img)
      if (ch != 'a' && ch != 'b') throw InvalidRule("substitution image uses symbols outside {a,b}");
  if (rule.seed != 'a' && rule.seed != 'b') throw InvalidRule("seed must be 'a' or 'b'");
  if (rule.image(rule.seed).front() != rule.seed)
    throw NonPrefixRule("rule image of the seed does not begin with the seed");
}

std::string repeat(char c, int n) { return std::string(static_cast<size_t>(n), c); }

// floor(sqrt(x)) for x >= 0 in 128-bit arithmetic.
std::int64_t isqrt128(__int128 x) {
  if (x < 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
  while (static_cast<__int128>(r) * r > x) --r;
  while (static_cast<__int128>(r + 1) * (r + 1) <= x) ++r;
  return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

// floor(n * omega) for a surd omega = (sqrt(d) - p)/q, exact in integer
// arithmetic: floor((sqrt(n^2 d) - n p)/q) with sqrt(n^2 d) irrational.
std::int64_t floor_n_omega_surd(const RotationNumber& w, index_t n) {
  if (n == 0) return 0;
  if (n < 0) return -floor_n_omega_surd(w, -n) - 1;
  const std::int64_t root = isqrt128(static_cast<__int128>(w.d) * n * n);
  return floor_div(root - w.p * n, w.q);
}

}  // namespace

SubstitutionRule period_doubling_rule() { return {"ab", "aa", 'a'}; }
SubstitutionRule fibonacci_rule() { return {"ab", "a", 'a'}; }
SubstitutionRule thue_morse_rule() { return {"ab", "ba", 'a'}; }

SubstitutionRule odd_block_rule(int k, int l) {
  if (k < 1 || l < 1) throw InvalidRule("odd_block_rule requires k,l >= 1");
  return {repeat('a', 2 * k - 1) + "b", repeat('a', 2 * l), 'a'};
}

SubstitutionRule even_block_rule(int k, int l) {
  if (k < 1 || l < 1) throw InvalidRule("even_block_rule requires k,l >= 1");
  return {repeat('a', 2 * k) + "b", repeat('a', 2 * l), 'a'};
}

SubstitutionRule generalized_fibonacci_rule(int m, int n) {
  if (m < 1 || n < 1) throw InvalidRule("generalized_fibonacci_rule requires m,n >= 1");
  return {repeat('a', m) + repeat('b', n), "a", 'a'};
}

SubstitutionRule generalized_thue_morse_rule(int m, int n) {
  if (m < 1 || n < 1) throw InvalidRule("generalized_thue_morse_rule requires m,n >= 1");
  return {repeat('a', m) + repeat('b', n), repeat('b', n) + repeat('a', m), 'a'};
}

double RotationNumber::value() const {
  if (!is_surd) return approx;
  return (std::sqrt(static_cast<double>(d)) - static_cast<double>(p)) / static_cast<double>(q);
}

RotationNumber RotationNumber::golden_mean() { return surd(5, 1, 2); }
RotationNumber RotationNumber::silver_mean() { return surd(2, 1, 1); }

RotationNumber RotationNumber::surd(std::int64_t d, std::int64_t p, std::int64_t q) {
  RotationNumber w;
  w.is_surd = true;
  w.d = d;
  w.p = p;
  w.q = q;
  if (d <= 0 || q <= 0) throw Error("surd requires d > 0, q > 0");
  const std::int64_t r = isqrt128(d);
  if (r * r == d) throw RationalInput("surd with square d is rational");
  w.approx = w.value();
  if (!(w.approx > 0.0 && w.approx < 1.0)) throw Error("rotation number must lie in (0,1)");
  return w;
}

RotationNumber RotationNumber::decimal(double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw Error("rotation number must lie in (0,1)");
  RotationNumber w;
  w.is_surd = false;
  w.approx = omega;
  return w;
}

std::string PotentialSpec::label() const {
  std::ostringstream os;
  switch (family) {
    case Family::Substitution:
      os << "subst[a->" << rule.image_a << ",b->" << rule.image_b << "]";
      break;
    case Family::Sturmian:
      os << "sturmian[omega=" << omega.value() << ",theta=" << theta << ",lambda=" << coupling << "]";
      break;
    case Family::Prime:
      os << "prime";
      break;
    case Family::Sparse:
      os << "sparse[gamma=" << gamma << "]";
      break;
    case Family::Hierarchical:
      os << "hierarchical[lambda=" << coupling << ",R=" << ratio << "]";
      break;
    case Family::Explicit:
      os << "explicit[" << explicit_values.size() << " values]";
      break;
  }
  return os.str();
}

std::string subst_fixed_point(const SubstitutionRule& rule, index_t length) {
  validate_rule(rule);
  if (length < 1) throw Error("subst_fixed_point requires length >= 1");

  std::string word(1, rule.seed);
  const auto want = static_cast<size_t>(length);
  while (word.size() < want) {
    std::string next;
    next.reserve(std::min<size_t>(2 * want, 4 * word.size() + 8));
    for (char ch : word) {
      next += rule.image(ch);
      if (next.size() >= want) break;
    }
    if (next == word) {
      // Non-growing rule: the finite word is itself invariant, so the
      // infinite fixed point is its periodic extension.
      while (word.size() < want) word += next;
      break;
    }
    word = std::move(next);
  }
  word.resize(want);
  return word;
}

int ord2(index_t n) {
  if (n == 0) throw Error("ord2 undefined at 0");
  const auto u = static_cast<std::uint64_t>(n < 0 ? -n : n);
  return __builtin_ctzll(u);
}

double hier_profile(int m, double R) {
  double f = 0.0, pow_r = 1.0;
  for (int k = 0; k < m; ++k) {
    f += pow_r;
    pow_r *= R;
  }
  return f;
}

bool is_prime(index_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (index_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

int sturmian_symbol(const RotationNumber& omega, double theta, index_t n) {
  if (omega.is_surd && theta == 0.0 && std::abs(n) < (index_t{1} << 30)) {
    return static_cast<int>(floor_n_omega_surd(omega, n + 1) - floor_n_omega_surd(omega, n));
  }
  // v(n) = 1  iff  frac(n*omega + theta) >= 1 - omega  iff  the floor jumps.
  const long double w = omega.is_surd
                            ? (std::sqrt(static_cast<long double>(omega.d)) - omega.p) / omega.q
                            : static_cast<long double>(omega.approx);
  const long double lo = std::floor(static_cast<long double>(n) * w + theta);
  const long double hi = std::floor(static_cast<long double>(n + 1) * w + theta);
  return static_cast<int>(hi - lo);
}

PotentialSamples realize(const PotentialSpec& spec, Window window) {
  if (window.lo > window.hi) throw Error("realize: empty window");
  if (window.length() > spec.max_window)
    throw WindowTooLarge("window length " + std::to_string(window.length()) +
                         " exceeds configured maximum");

  PotentialSamples out;
  out.window = window;
  out.values.resize(static_cast<size_t>(window.length()));

  switch (spec.family) {
    case Family::Substitution: {
      if (spec.geometry == Geometry::HalfLine) {
        const index_t need = std::max<index_t>(window.hi, 1);
        const std::string u = subst_fixed_point(spec.rule, need);
        for (index_t n = window.lo; n <= window.hi; ++n)
          out.at(n) = n >= 1 ? (u[static_cast<size_t>(n - 1)] == 'a' ? spec.level_a : spec.level_b)
                             : spec.level_a;
      } else {
        // Two-sided window cut from the middle of a long prefix of the fixed
        // point; any factor of the fixed point is a legal subshift word.
        const index_t half = std::max(std::abs(window.lo), std::abs(window.hi));
        const std::string u = subst_fixed_point(spec.rule, 2 * half + 1);
        for (index_t n = window.lo; n <= window.hi; ++n)
          out.at(n) = u[static_cast<size_t>(n + half)] == 'a' ? spec.level_a : spec.level_b;
      }
      break;
    }
    case Family::Sturmian: {
      for (index_t n = window.lo; n <= window.hi; ++n)
        out.at(n) = spec.coupling * sturmian_symbol(spec.omega, spec.theta, n);
      break;
    }
    case Family::Prime: {
      // Sieve over the positive part of the window.
      const index_t top = std::max<index_t>(window.hi, 1);
      std::vector<bool> composite(static_cast<size_t>(top + 1), false);
      for (index_t i = 2; i * i <= top; ++i)
        if (!composite[static_cast<size_t>(i)])
          for (index_t j = i * i; j <= top; j += i) composite[static_cast<size_t>(j)] = true;
      for (index_t n = window.lo; n <= window.hi; ++n) {
        const bool prime = n >= 2 && !composite[static_cast<size_t>(n)];
        out.at(n) = prime ? spec.level_b : spec.level_a;
      }
      break;
    }
    case Family::Sparse: {
      if (spec.gamma < 2) throw Error("sparse family requires gamma >= 2");
      for (index_t n = window.lo; n <= window.hi; ++n) out.at(n) = spec.level_a;
      for (index_t nk = spec.gamma; nk <= window.hi; nk *= spec.gamma) {
        if (nk >= window.lo) out.at(nk) = spec.level_b;
        if (nk > window.hi / spec.gamma) break;  // next power would overflow
      }
      break;
    }
    case Family::Hierarchical: {
      for (index_t n = window.lo; n <= window.hi; ++n)
        out.at(n) = n == 0 ? spec.v_origin : spec.coupling * hier_profile(ord2(n), spec.ratio);
      break;
    }
    case Family::Explicit: {
      const Window have{spec.explicit_lo,
                        spec.explicit_lo + static_cast<index_t>(spec.explicit_values.size()) - 1};
      if (!have.contains(window))
        throw OutOfWindow("explicit potential does not cover the requested window");
      for (index_t n = window.lo; n <= window.hi; ++n)
        out.at(n) = spec.explicit_values[static_cast<size_t>(n - spec.explicit_lo)];
      break;
    }
  }
  return out;
}

namespace {

struct Run {
  index_t start;  // 1-based
  index_t len;
  bool interior;
};

// Maximal runs of `letter` inside word[from..], 1-based indexing.
std::vector<Run> letter_runs(std::string_view word, char letter, index_t from) {
  std::vector<Run> runs;
  const auto n = static_cast<index_t>(word.size());
  index_t i = from;
  while (i <= n) {
    if (word[static_cast<size_t>(i - 1)] != letter) {
      ++i;
      continue;
    }
    index_t j = i;
    while (j + 1 <= n && word[static_cast<size_t>(j)] == letter) ++j;
    const bool left_delim = i - 1 >= from && word[static_cast<size_t>(i - 2)] != letter;
    const bool right_delim = j + 1 <= n;
    runs.push_back({i, j - i + 1, left_delim && right_delim});
    i = j + 1;
  }
  return runs;
}

StructureReport check_runs(std::string_view word, char letter, index_t from,
                           const std::function<bool(index_t)>& len_ok) {
  for (const Run& r : letter_runs(word, letter, from))
    if (r.interior && !len_ok(r.len)) return {false, r.start};
  return {true, -1};
}

}  // namespace

StructureReport check_structure(std::string_view word, StructureCondition cond,
                                index_t from_index, int k) {
  const auto n = static_cast<index_t>(word.size());
  if (from_index < 1 || from_index > n + 1) throw Error("check_structure: from_index outside word");
  if (from_index > n) return {true, -1};

  switch (cond) {
    case StructureCondition::S1: {
      for (index_t i = from_index; i <= n; ++i) {
        if (word[static_cast<size_t>(i - 1)] != 'b') continue;
        const bool left_bad = i > 1 && word[static_cast<size_t>(i - 2)] == 'b';
        const bool right_bad = i < n && word[static_cast<size_t>(i)] == 'b';
        if (left_bad || right_bad) return {false, i};
      }
      return {true, -1};
    }
    case StructureCondition::S2:
      return check_runs(word, 'a', from_index, [](index_t len) { return len % 2 == 1; });
    case StructureCondition::S3:
      return check_runs(word, 'a', from_index, [](index_t len) { return len % 2 == 0; });
    case StructureCondition::S4: {
      if (k < 3 || k % 2 == 0) throw Error("check_structure: S4 requires odd k >= 3");
      return check_runs(word, 'b', from_index, [k](index_t len) { return len % k == 0; });
    }
  }
  return {true, -1};
}

namespace {

bool holds(std::string_view w, StructureCondition c, index_t from, int k = 3) {
  return check_structure(w, c, from, k).holds;
}

std::string_view swap_roles(std::string& storage, std::string_view word) {
  storage.assign(word);
  for (char& c : storage) c = c == 'a' ? 'b' : 'a';
  return storage;
}

// Largest odd divisor >= 3 of the gcd of interior runs of `letter`; 0 if none.
int s4_parameter(std::string_view word, char letter, index_t from) {
  index_t g = 0;
  bool any = false;
  for (const Run& r : letter_runs(word, letter, from))
    if (r.interior) {
      g = std::gcd(g, r.len);
      any = true;
    }
  if (!any || g == 0) return 0;
  while (g % 2 == 0) g /= 2;
  return g >= 3 ? static_cast<int>(g) : 0;
}

std::vector<SpecialEnergy> classify_cos_ladder(double base, double other, int k) {
  // T(base, E)^k = +-I exactly at E = base + 2 cos(j pi / k), j = 1..k-1.
  std::vector<SpecialEnergy> out;
  constexpr double kEqTol = 1e-12;
  for (int j = 1; j < k; ++j) {
    const double e0 = base + 2.0 * std::cos(j * M_PI / k);
    const double gap = std::abs(other - e0);
    if (gap < 2.0 - kEqTol)
      out.push_back({e0, GrowthClass::Bounded});
    else if (gap <= 2.0 + kEqTol)
      out.push_back({e0, GrowthClass::Linear});
    // |other - E0| > 2: the companion letter's step matrix is hyperbolic,
    // products can grow exponentially and no growth class applies; the
    // energy is dropped.
  }
  std::sort(out.begin(), out.end(),
            [](const SpecialEnergy& x, const SpecialEnergy& y) { return x.energy < y.energy; });
  return out;
}

}  // namespace

std::vector<SpecialEnergy> special_energies(const PotentialSpec& spec) {
  constexpr index_t kProbeLength = 8192;
  constexpr double kEqTol = 1e-12;

  std::string word;
  index_t from = 1;
  switch (spec.family) {
    case Family::Substitution:
      word = subst_fixed_point(spec.rule, kProbeLength);
      break;
    case Family::Prime: {
      PotentialSpec probe = spec;
      probe.level_a = 0;
      probe.level_b = 1;
      PotentialSamples v = realize(probe, {1, kProbeLength});
      for (index_t n = 1; n <= kProbeLength; ++n) word += v[n] == 0.0 ? 'a' : 'b';
      from = 4;  // primes 2,3 are adjacent; (S1),(S2) hold beyond them
      break;
    }
    case Family::Sparse: {
      PotentialSpec probe = spec;
      probe.level_a = 0;
      probe.level_b = 1;
      PotentialSamples v = realize(probe, {1, kProbeLength});
      for (index_t n = 1; n <= kProbeLength; ++n) word += v[n] == 0.0 ? 'a' : 'b';
      break;
    }
    default:
      throw NoKnownSpecialEnergy("special energies are defined for two-valued block-structured families");
  }

  const double a = spec.level_a, b = spec.level_b;
  const double gap = std::abs(a - b);
  std::string swapped_storage;
  const std::string_view sw = swap_roles(swapped_storage, word);

  // (S1) and (S2): products collapse to parabolic powers at E0 = a.
  if (holds(word, StructureCondition::S1, from) && holds(word, StructureCondition::S2, from))
    return {{a, GrowthClass::Linear}};
  if (holds(sw, StructureCondition::S1, from) && holds(sw, StructureCondition::S2, from))
    return {{b, GrowthClass::Linear}};

  // (S3): elliptic (bounded) for |a-b| < 2, parabolic (linear) at |a-b| = 2.
  if (holds(word, StructureCondition::S3, from)) {
    if (gap < 2.0 - kEqTol) return {{a, GrowthClass::Bounded}};
    if (gap <= 2.0 + kEqTol) return {{a, GrowthClass::Linear}};
    return {};
  }
  if (holds(sw, StructureCondition::S3, from)) {
    if (gap < 2.0 - kEqTol) return {{b, GrowthClass::Bounded}};
    if (gap <= 2.0 + kEqTol) return {{b, GrowthClass::Linear}};
    return {};
  }

  // (S4): k-1 energies where the b-block monodromy is +-I.
  if (int k = s4_parameter(word, 'b', from); k != 0 && holds(word, StructureCondition::S4, from, k))
    return classify_cos_ladder(b, a, k);
  if (int k = s4_parameter(word, 'a', from); k != 0 && holds(sw, StructureCondition::S4, from, k))
    return classify_cos_ladder(a, b, k);

  throw NoKnownSpecialEnergy("word structure not recognized among (S1&S2), (S3), (S4)");
}

}  // namespace qdyn1d
