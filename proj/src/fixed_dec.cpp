#include "lendsim/fixed_dec.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cctype>

namespace lendsim {

namespace {

const int256& scale256() {
  static const int256 s = []() {
    int256 v = 1;
    for (int i = 0; i < FixedDec::kFracDigits; ++i) v *= 10;
    return v;
  }();
  return s;
}

const int512& scale512() {
  static const int512 s = int512(scale256());
  return s;
}

// finite cap: 1e40 in value terms, raw 1e58
const int256& max_raw() {
  static const int256 m = []() {
    int256 v = scale256();
    for (int i = 0; i < 40; ++i) v *= 10;
    return v;
  }();
  return m;
}

// sentinel well past the finite cap
const int256& inf_raw() {
  static const int256 m = max_raw() * 1000;
  return m;
}

int512 abs512(const int512& x) { return x < 0 ? int512(-x) : x; }

// truncating division plus a half-away-from-zero correction
int512 round_div(const int512& num, const int512& den) {
  if (den == 0) throw SimError(ErrorCode::DivisionByZero, "division by zero");
  int512 q = num / den;
  int512 r = num % den;
  if (r != 0 && abs512(r) * 2 >= abs512(den)) {
    q += ((num < 0) == (den < 0)) ? 1 : -1;
  }
  return q;
}

FixedDec checked(const int512& raw) {
  if (abs512(raw) > int512(max_raw())) {
    throw SimError(ErrorCode::ArithmeticOverflow, "value exceeds 1e40");
  }
  return FixedDec::from_raw(int256(raw));
}

void require_finite(const FixedDec& x, const char* op) {
  if (x.is_infinite()) {
    throw SimError(ErrorCode::DomainError, std::string(op) + " on infinity");
  }
}

}  // namespace

FixedDec FixedDec::from_raw(const int256& raw) {
  if (raw == inf_raw()) {
    FixedDec out;
    out.raw_ = raw;
    return out;
  }
  if (raw > max_raw() || raw < -max_raw()) {
    throw SimError(ErrorCode::ArithmeticOverflow, "raw mantissa exceeds 1e58");
  }
  FixedDec out;
  out.raw_ = raw;
  return out;
}

FixedDec FixedDec::from_integer(const int256& n) {
  return checked(int512(n) * scale512());
}

FixedDec FixedDec::one() { return from_raw(scale256()); }

FixedDec FixedDec::infinity() {
  FixedDec out;
  out.raw_ = inf_raw();
  return out;
}

bool FixedDec::is_infinite() const { return raw_ == inf_raw(); }

FixedDec FixedDec::from_string(std::string_view text) {
  if (text == "inf") return infinity();
  size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  int256 value = 0;
  size_t int_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    value = value * 10 + (text[i] - '0');
    ++int_digits;
    ++i;
    if (value > max_raw()) {
      throw SimError(ErrorCode::ArithmeticOverflow,
                     "integer part of \"" + std::string(text) + "\" exceeds 1e40");
    }
  }
  size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      value = value * 10 + (text[i] - '0');
      ++frac_digits;
      ++i;
    }
    if (frac_digits == 0) {
      throw SimError(ErrorCode::DomainError,
                     "no digits after decimal point in \"" + std::string(text) + "\"");
    }
    if (frac_digits > static_cast<size_t>(kFracDigits)) {
      throw SimError(ErrorCode::DomainError,
                     "more than 18 fractional digits in \"" + std::string(text) + "\"");
    }
  }
  if (i != text.size() || int_digits + frac_digits == 0) {
    throw SimError(ErrorCode::DomainError,
                   "malformed decimal \"" + std::string(text) + "\"");
  }
  for (size_t k = frac_digits; k < static_cast<size_t>(kFracDigits); ++k) value *= 10;
  if (negative) value = -value;
  return checked(int512(value));
}

FixedDec FixedDec::add(const FixedDec& other) const {
  require_finite(*this, "add");
  require_finite(other, "add");
  return checked(int512(raw_) + int512(other.raw_));
}

FixedDec FixedDec::sub(const FixedDec& other) const {
  require_finite(*this, "sub");
  require_finite(other, "sub");
  return checked(int512(raw_) - int512(other.raw_));
}

FixedDec FixedDec::mul(const FixedDec& other) const {
  require_finite(*this, "mul");
  require_finite(other, "mul");
  return checked(round_div(int512(raw_) * int512(other.raw_), scale512()));
}

FixedDec FixedDec::div(const FixedDec& other) const {
  require_finite(*this, "div");
  require_finite(other, "div");
  return checked(round_div(int512(raw_) * scale512(), int512(other.raw_)));
}

FixedDec FixedDec::mul_div(const FixedDec& a, const FixedDec& b, const FixedDec& c) {
  require_finite(a, "mul_div");
  require_finite(b, "mul_div");
  require_finite(c, "mul_div");
  return checked(round_div(int512(a.raw_) * int512(b.raw_), int512(c.raw_)));
}

FixedDec FixedDec::pow_int(uint64_t exponent) const {
  require_finite(*this, "pow_int");
  FixedDec acc = one();
  FixedDec base = *this;
  while (exponent != 0) {
    if (exponent & 1) acc = acc.mul(base);
    exponent >>= 1;
    if (exponent != 0) base = base.mul(base);
  }
  return acc;
}

FixedDec FixedDec::sqrt() const {
  require_finite(*this, "sqrt");
  if (raw_ < 0) throw SimError(ErrorCode::DomainError, "sqrt of negative value");
  int512 widened = int512(raw_) * scale512();
  return checked(boost::multiprecision::sqrt(widened));
}

FixedDec FixedDec::neg() const {
  require_finite(*this, "neg");
  return from_raw(-raw_);
}

FixedDec FixedDec::abs() const {
  require_finite(*this, "abs");
  return raw_ < 0 ? from_raw(-raw_) : *this;
}

int256 FixedDec::to_integer() const {
  require_finite(*this, "to_integer");
  return int256(round_div(int512(raw_), scale512()));
}

std::string FixedDec::to_string() const {
  if (is_infinite()) return "inf";
  int256 mag = raw_ < 0 ? int256(-raw_) : raw_;
  int256 whole = mag / scale256();
  int256 frac = mag % scale256();
  std::string out = raw_ < 0 ? "-" : "";
  out += whole.str();
  if (frac != 0) {
    std::string digits = frac.str();
    digits.insert(0, static_cast<size_t>(kFracDigits) - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

}  // namespace lendsim
