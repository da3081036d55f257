#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qdyn1d {

/// Unsigned big integer, base 2^32 limbs, least significant first. Just
/// enough arithmetic for continued-fraction convergents (p_k = a_k p_{k-1} +
/// p_{k-2} grows exponentially and overflows int64 near depth 90 already for
/// the golden mean).
class BigUint {
 public:
  BigUint() = default;
  BigUint(std::uint64_t v) {  // NOLINT: implicit by design
    while (v) {
      limbs_.push_back(static_cast<std::uint32_t>(v));
      v >>= 32;
    }
  }

  bool is_zero() const { return limbs_.empty(); }

  friend BigUint operator+(const BigUint& x, const BigUint& y) {
    BigUint r;
    const size_t n = std::max(x.limbs_.size(), y.limbs_.size());
    r.limbs_.reserve(n + 1);
    std::uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
      carry += i < x.limbs_.size() ? x.limbs_[i] : 0;
      carry += i < y.limbs_.size() ? y.limbs_[i] : 0;
      r.limbs_.push_back(static_cast<std::uint32_t>(carry));
      carry >>= 32;
    }
    if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
    return r;
  }

  friend BigUint operator*(const BigUint& x, std::uint64_t s) {
    BigUint r;
    if (s == 0 || x.is_zero()) return r;
    const std::uint64_t s_lo = s & 0xffffffffu, s_hi = s >> 32;
    r.limbs_.assign(x.limbs_.size() + 2, 0);
    for (size_t i = 0; i < x.limbs_.size(); ++i) {
      r.add_at(i, static_cast<std::uint64_t>(x.limbs_[i]) * s_lo);
      if (s_hi) r.add_at(i + 1, static_cast<std::uint64_t>(x.limbs_[i]) * s_hi);
    }
    r.trim();
    return r;
  }

  friend BigUint operator*(const BigUint& x, const BigUint& y) {
    BigUint r;
    if (x.is_zero() || y.is_zero()) return r;
    r.limbs_.assign(x.limbs_.size() + y.limbs_.size(), 0);
    for (size_t i = 0; i < x.limbs_.size(); ++i)
      for (size_t j = 0; j < y.limbs_.size(); ++j)
        r.add_at(i + j, static_cast<std::uint64_t>(x.limbs_[i]) * y.limbs_[j]);
    r.trim();
    return r;
  }

  /// x - y; requires x >= y.
  friend BigUint operator-(const BigUint& x, const BigUint& y) {
    BigUint r;
    r.limbs_.resize(x.limbs_.size());
    std::int64_t borrow = 0;
    for (size_t i = 0; i < x.limbs_.size(); ++i) {
      std::int64_t v = static_cast<std::int64_t>(x.limbs_[i]) - borrow -
                       static_cast<std::int64_t>(i < y.limbs_.size() ? y.limbs_[i] : 0);
      borrow = v < 0;
      if (v < 0) v += std::int64_t{1} << 32;
      r.limbs_[i] = static_cast<std::uint32_t>(v);
    }
    r.trim();
    return r;
  }

  friend bool operator==(const BigUint& x, const BigUint& y) { return x.limbs_ == y.limbs_; }
  friend bool operator<(const BigUint& x, const BigUint& y) {
    if (x.limbs_.size() != y.limbs_.size()) return x.limbs_.size() < y.limbs_.size();
    for (size_t i = x.limbs_.size(); i-- > 0;)
      if (x.limbs_[i] != y.limbs_[i]) return x.limbs_[i] < y.limbs_[i];
    return false;
  }

  double to_double() const {
    double v = 0.0;
    for (size_t i = limbs_.size(); i-- > 0;) v = v * 4294967296.0 + limbs_[i];
    return v;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::vector<std::uint32_t> work(limbs_);
    std::string digits;
    while (!work.empty()) {
      std::uint64_t rem = 0;
      for (size_t i = work.size(); i-- > 0;) {
        const std::uint64_t cur = (rem << 32) | work[i];
        work[i] = static_cast<std::uint32_t>(cur / 10);
        rem = cur % 10;
      }
      digits.push_back(static_cast<char>('0' + rem));
      while (!work.empty() && work.back() == 0) work.pop_back();
    }
    return {digits.rbegin(), digits.rend()};
  }

 private:
  void add_at(size_t pos, std::uint64_t v) {
    while (v) {
      if (pos >= limbs_.size()) limbs_.resize(pos + 1, 0);
      v += limbs_[pos];
      limbs_[pos] = static_cast<std::uint32_t>(v);
      v >>= 32;
      ++pos;
    }
  }
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  }

  std::vector<std::uint32_t> limbs_;
};

}  // namespace qdyn1d
