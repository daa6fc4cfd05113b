#include <doctest.h>

#include <cmath>

#include "fuzzyalign/value.hpp"

using namespace fuzzyalign;

TEST_CASE("parse_decimal accepts plain literals only") {
  CHECK(parse_decimal("10000") == 10000.0);
  CHECK(parse_decimal("-2.5e3") == -2500.0);
  CHECK(parse_decimal("+.5") == 0.5);
  CHECK_FALSE(parse_decimal("inf"));
  CHECK_FALSE(parse_decimal("nan"));
  CHECK_FALSE(parse_decimal("12abc"));
  CHECK_FALSE(parse_decimal(""));
  CHECK_FALSE(parse_decimal("1e"));
}

TEST_CASE("format_number round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 9950.0, 97.0, 1e-300, 123456789.123}) {
    auto back = parse_decimal(format_number(v));
    REQUIRE(back);
    CHECK(*back == v);
  }
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(35) == "35");
}

TEST_CASE("nine significant digits") {
  CHECK(round_sig9(0.26474820143884894) == doctest::Approx(0.264748201).epsilon(1e-12));
  CHECK(format_sig9(50.0 / 6950.0) == "0.0071942446");
  CHECK(format_sig9(1.0) == "1");
  CHECK(round_sig9(0.0) == 0.0);
}

TEST_CASE("infer_value") {
  CHECK(infer_value("60") == Value(60.0));
  CHECK(infer_value("approved") == Value(std::string("approved")));
}
