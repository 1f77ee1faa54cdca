#include <doctest.h>

#include <functional>

#include "lendsim/fixed_dec.hpp"

using lendsim::ErrorCode;
using lendsim::fd;
using lendsim::FixedDec;
using lendsim::SimError;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SimError& e) {
    return e.code();
  }
  FAIL("expected SimError");
  return ErrorCode::DomainError;
}

}  // namespace

TEST_CASE("string round trips are exact") {
  for (const char* text : {"0", "1", "-1", "0.5", "123.456", "1000000",
                           "0.000000000000000001", "-0.000000000000000001",
                           "123456789.987654321123456789",
                           "10000000000000000000000000000000000000",
                           "-99999999999999999999999999999999999999"}) {
    CHECK(fd(text).to_string() == text);
  }
  CHECK(fd("1.500000").to_string() == "1.5");
  CHECK(fd("007").to_string() == "7");
  CHECK(fd("-0").to_string() == "0");
  CHECK(fd(".25").to_string() == "0.25");
  CHECK(fd("+2").to_string() == "2");
}

TEST_CASE("malformed decimals are rejected") {
  for (const char* text : {"", ".", "1.", "1.2.3", "abc", "1e5", "1 ", " 1",
                           "--1", "0.1234567890123456789"}) {
    CHECK(code_of([&] { fd(text); }) == ErrorCode::DomainError);
  }
  CHECK(code_of([] { fd("100000000000000000000000000000000000000000"); }) ==
        ErrorCode::ArithmeticOverflow);
}

TEST_CASE("arithmetic rounds half away from zero") {
  CHECK(fd("1").div(fd("3")).to_string() == "0.333333333333333333");
  CHECK(fd("2").div(fd("3")).to_string() == "0.666666666666666667");
  CHECK(fd("-2").div(fd("3")).to_string() == "-0.666666666666666667");
  // raw 3 halved lands exactly on .5 ulp and moves away from zero
  CHECK(fd("0.000000000000000003").div(fd("2")).raw() == 2);
  CHECK(fd("-0.000000000000000003").div(fd("2")).raw() == -2);
  CHECK(fd("1.5").mul(fd("2")).to_string() == "3");
  CHECK((fd("0.1") + fd("0.2")).to_string() == "0.3");
  CHECK(fd("2.5").to_integer() == 3);
  CHECK(fd("-2.5").to_integer() == -3);
  CHECK(fd("2.4").to_integer() == 2);
}

TEST_CASE("mul_div rounds once") {
  // 2/3*3: two roundings drift by an ulp, the fused form does not
  CHECK(fd("2").div(fd("3")).mul(fd("3")).to_string() == "2.000000000000000001");
  CHECK(FixedDec::mul_div(fd("2"), fd("3"), fd("3")) == fd("2"));
  CHECK(FixedDec::mul_div(fd("10"), fd("3"), fd("4")).to_string() == "7.5");
}

TEST_CASE("division by zero reports the right code") {
  CHECK(code_of([] { fd("1").div(fd("0")); }) == ErrorCode::DivisionByZero);
}

TEST_CASE("pow_int uses repeated squaring semantics") {
  CHECK(fd("2").pow_int(10).to_string() == "1024");
  CHECK(fd("1.5").pow_int(0) == FixedDec::one());
  CHECK(fd("1.5").pow_int(1) == fd("1.5"));
  CHECK(fd("0").pow_int(3) == FixedDec::zero());
  // split exponents agree within the rounding budget of the extra muls
  const FixedDec x = fd("1.000000123456789");
  const FixedDec lhs = x.pow_int(7);
  const FixedDec rhs = x.pow_int(3).mul(x.pow_int(4));
  CHECK((lhs - rhs).abs() <= FixedDec::from_raw(7));
}

TEST_CASE("sqrt rounds down") {
  CHECK(fd("0.81").sqrt().to_string() == "0.9");
  CHECK(fd("2").sqrt().to_string() == "1.414213562373095048");
  CHECK(fd("4").sqrt().to_string() == "2");
  CHECK(fd("0").sqrt() == FixedDec::zero());
  CHECK(code_of([] { fd("-1").sqrt(); }) == ErrorCode::DomainError);
  for (const char* text : {"0.5", "3", "123.456", "0.000000000000000007"}) {
    const FixedDec x = fd(text);
    const FixedDec r = x.sqrt();
    CHECK(r.mul(r) <= x);                          // never overshoots
    const FixedDec next = r + FixedDec::ulp();
    CHECK(next.mul(next) >= x);                    // and is the largest such
  }
}

TEST_CASE("overflow is reported, not wrapped") {
  const FixedDec big = fd("10000000000000000000000000000000000000000");  // 1e40
  CHECK(big.to_string() == "10000000000000000000000000000000000000000");
  CHECK(code_of([&] { big.mul(fd("10")); }) == ErrorCode::ArithmeticOverflow);
  CHECK(code_of([&] { big.add(FixedDec::ulp()); }) == ErrorCode::ArithmeticOverflow);
}

TEST_CASE("infinity is a sentinel, not a number") {
  const FixedDec inf = FixedDec::infinity();
  CHECK(inf.to_string() == "inf");
  CHECK(fd("inf") == inf);
  CHECK(inf > fd("10000000000000000000000000000000000000000"));
  CHECK(inf.is_infinite());
  CHECK(code_of([&] { inf.add(fd("1")); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { fd("1").mul(inf); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { inf.sqrt(); }) == ErrorCode::DomainError);
}

TEST_CASE("ordering and helpers") {
  CHECK(FixedDec::ulp().to_string() == "0.000000000000000001");
  CHECK(fd("-3").abs() == fd("3"));
  CHECK(fd("3").neg() == fd("-3"));
  CHECK(fd("1").min(fd("2")) == fd("1"));
  CHECK(fd("1").max(fd("2")) == fd("2"));
  CHECK(fd("-1").is_negative());
  CHECK(FixedDec().is_zero());
}
