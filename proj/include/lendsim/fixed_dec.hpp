#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "lendsim/errors.hpp"

namespace lendsim {

using int256 = boost::multiprecision::int256_t;
using int512 = boost::multiprecision::int512_t;

// Signed decimal fixed point with 18 fractional digits (the ERC-20 wad
// convention) on a 256-bit mantissa. Intermediates widen to 512 bits, so a
// single multiply or divide never wraps; every inexact operation rounds
// half away from zero. Finite magnitudes are capped at 1e40 (raw 1e58) and
// anything larger reports arithmetic-overflow instead of wrapping.
//
// One positive infinity exists as a sentinel (the health factor of a
// position with no debt). It compares greater than every finite value;
// feeding it to arithmetic throws domain-error.
class FixedDec {
public:
  static constexpr int kFracDigits = 18;

  FixedDec() = default;

  static FixedDec from_raw(const int256& raw);
  static FixedDec from_integer(const int256& n);
  static FixedDec from_string(std::string_view text);
  static FixedDec zero() { return FixedDec(); }
  static FixedDec one();
  static FixedDec infinity();
  // smallest positive step, 1e-18
  static FixedDec ulp() { return from_raw(1); }

  const int256& raw() const { return raw_; }
  bool is_infinite() const;
  bool is_zero() const { return raw_ == 0; }
  bool is_negative() const { return raw_ < 0; }
  bool is_positive() const { return raw_ > 0; }

  FixedDec add(const FixedDec& other) const;
  FixedDec sub(const FixedDec& other) const;
  FixedDec mul(const FixedDec& other) const;
  FixedDec div(const FixedDec& other) const;
  // a*b/c with one rounding at the end
  static FixedDec mul_div(const FixedDec& a, const FixedDec& b, const FixedDec& c);
  // repeated squaring; exponent 0 gives 1
  FixedDec pow_int(uint64_t exponent) const;
  // largest representable value whose square does not exceed this (round down)
  FixedDec sqrt() const;
  FixedDec neg() const;
  FixedDec abs() const;
  FixedDec min(const FixedDec& other) const { return *this <= other ? *this : other; }
  FixedDec max(const FixedDec& other) const { return *this >= other ? *this : other; }

  // nearest integer, half away from zero
  int256 to_integer() const;
  // shortest decimal string that parses back to the same value
  std::string to_string() const;

  friend FixedDec operator+(const FixedDec& a, const FixedDec& b) { return a.add(b); }
  friend FixedDec operator-(const FixedDec& a, const FixedDec& b) { return a.sub(b); }
  friend FixedDec operator*(const FixedDec& a, const FixedDec& b) { return a.mul(b); }
  friend FixedDec operator/(const FixedDec& a, const FixedDec& b) { return a.div(b); }
  friend FixedDec operator-(const FixedDec& a) { return a.neg(); }

  friend bool operator==(const FixedDec& a, const FixedDec& b) { return a.raw_ == b.raw_; }
  friend bool operator!=(const FixedDec& a, const FixedDec& b) { return a.raw_ != b.raw_; }
  friend bool operator<(const FixedDec& a, const FixedDec& b) { return a.raw_ < b.raw_; }
  friend bool operator<=(const FixedDec& a, const FixedDec& b) { return a.raw_ <= b.raw_; }
  friend bool operator>(const FixedDec& a, const FixedDec& b) { return a.raw_ > b.raw_; }
  friend bool operator>=(const FixedDec& a, const FixedDec& b) { return a.raw_ >= b.raw_; }

private:
  int256 raw_{};
};

inline FixedDec fd(std::string_view text) { return FixedDec::from_string(text); }

}  // namespace lendsim
