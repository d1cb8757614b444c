#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "numline/mathutil.hpp"
#include "numline/numparse.hpp"
#include "numline/rng.hpp"

using namespace numline;

TEST_CASE("decompose canonical examples") {
  const ParsedNumber n = decompose(600.0);
  CHECK(n.exponent == 2);
  CHECK(n.mantissa == doctest::Approx(6.0).epsilon(1e-12));

  const ParsedNumber one = decompose(1.0);
  CHECK(one.exponent == 0);
  CHECK(one.mantissa == 1.0);

  // 10^5 <= 999999 < 10^6 by exact integer comparison
  const ParsedNumber big = decompose(999999.0);
  CHECK(big.exponent == 5);
  CHECK(big.mantissa == doctest::Approx(9.99999).epsilon(1e-12));
}

TEST_CASE("decompose decade boundaries are exact") {
  for (int k = 0; k <= 16; ++k) {
    const ParsedNumber n = decompose(pow10i(k));
    CHECK(n.exponent == k);
    CHECK(n.mantissa == 1.0);
  }
  // closed upper boundary
  const ParsedNumber top = decompose(1e16);
  CHECK(top.exponent == 16);
  CHECK(top.mantissa == 1.0);
}

TEST_CASE("decompose rejects out-of-range and non-finite values") {
  CHECK_THROWS_AS(decompose(0.5), std::out_of_range);
  CHECK_THROWS_AS(decompose(0.0), std::out_of_range);
  CHECK_THROWS_AS(decompose(-3.0), std::out_of_range);
  CHECK_THROWS_AS(decompose(2e16), std::out_of_range);
  CHECK_THROWS_AS(decompose(std::numeric_limits<double>::infinity()), std::out_of_range);
  CHECK_THROWS_AS(decompose(std::numeric_limits<double>::quiet_NaN()), std::out_of_range);
}

TEST_CASE("recompose inverts decompose") {
  CHECK(recompose(2, 6.0) == 600.0);
  CHECK(recompose(0, 1.0) == 1.0);
  CHECK(recompose(2, 3.1622776601) == doctest::Approx(316.22776601).epsilon(1e-12));
  CHECK(recompose(16, 1.0) == 1e16);

  CHECK_THROWS_AS(recompose(-1, 5.0), std::out_of_range);
  CHECK_THROWS_AS(recompose(17, 1.0), std::out_of_range);
  CHECK_THROWS_AS(recompose(3, 0.5), std::out_of_range);
  CHECK_THROWS_AS(recompose(3, 10.0), std::out_of_range);
  CHECK_THROWS_AS(recompose(16, 2.0), std::out_of_range);
}

TEST_CASE("round trip over log-uniform values") {
  Rng rng(20519);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::pow(10.0, rng.uniform(0.0, 16.0));
    const ParsedNumber n = decompose(v);
    CHECK(n.mantissa >= 1.0);
    CHECK(n.mantissa < 10.0);
    const double back = recompose(n.exponent, n.mantissa);
    CHECK(std::abs(back - v) <= 1e-9 * v);
  }
}

TEST_CASE("scaling by ten shifts the exponent by one") {
  Rng rng(817);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, rng.uniform(0.0, 14.9));
    CHECK(decompose(v * 10.0).exponent == decompose(v).exponent + 1);
  }
}

TEST_CASE("extract finds literals behind currency symbols") {
  const auto spans = extract("Cohen paid her $130000 via");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].status == ParseStatus::Ok);
  CHECK(spans[0].parsed->value == 130000.0);
  CHECK(spans[0].surface == "130000");
}

TEST_CASE("extract returns nothing without numeric literals") {
  CHECK(extract("Tigers weigh [MASK] lbs.").empty());
  CHECK(extract("").empty());
}

TEST_CASE("extract handles thousands separators") {
  const auto spans = extract("from 1,700,000 onward");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].parsed->value == 1700000.0);
  CHECK(spans[0].surface == "1,700,000");

  // "," only binds groups of exactly three digits
  const auto bad_group = extract("pair 1,2345 here");
  REQUIRE(bad_group.size() == 2);
  CHECK(bad_group[0].raw_value == 1.0);
  CHECK(bad_group[1].raw_value == 2345.0);

  const auto short_group = extract("12,34");
  REQUIRE(short_group.size() == 2);
  CHECK(short_group[0].raw_value == 12.0);
  CHECK(short_group[1].raw_value == 34.0);
}

TEST_CASE("extract handles scientific and decimal literals") {
  const auto sci = extract("about 2.5e3 units and 6e2 more");
  REQUIRE(sci.size() == 2);
  CHECK(sci[0].parsed->value == 2500.0);
  CHECK(sci[1].parsed->value == 600.0);

  const auto dec = extract("price 16.38 dollars");
  REQUIRE(dec.size() == 1);
  CHECK(dec[0].parsed->value == 16.38);

  // trailing dot is punctuation, not a decimal point
  const auto dot = extract("measured 600.");
  REQUIRE(dot.size() == 1);
  CHECK(dot[0].surface == "600");
}

TEST_CASE("extract flags rather than drops bad literals") {
  const auto neg = extract("it was -40 degrees");
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].status == ParseStatus::NonPositive);
  CHECK(neg[0].raw_value == -40.0);
  CHECK(!neg[0].parsed.has_value());

  const auto zero = extract("exactly 0 left");
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].status == ParseStatus::NonPositive);

  const auto frac = extract("only 0.25 remained");
  REQUIRE(frac.size() == 1);
  CHECK(frac[0].status == ParseStatus::OutOfRange);
  CHECK(frac[0].raw_value == 0.25);

  const auto huge = extract("about 2e16 stars");
  REQUIRE(huge.size() == 1);
  CHECK(huge[0].status == ParseStatus::OutOfRange);

  const auto overflow = extract("count 1e999 things");
  REQUIRE(overflow.size() == 1);
  CHECK(overflow[0].status == ParseStatus::OutOfRange);
}

TEST_CASE("extract treats dashes between digits as ranges") {
  const auto spans = extract("seasons 2010-2015 aired");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].parsed->value == 2010.0);
  CHECK(spans[1].parsed->value == 2015.0);
}

TEST_CASE("extract is offset-faithful") {
  const std::string text = "FY2018 view $1.63 , up from 1,700,000 and -5 or 2.5e3 .";
  for (const auto& span : extract(text)) {
    CHECK(span.start < span.end);
    CHECK(text.substr(span.start, span.end - span.start) == span.surface);
  }
}

TEST_CASE("extract keeps left-to-right order") {
  const auto spans = extract("a 12 b 7 c 1999");
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].raw_value == 12.0);
  CHECK(spans[1].raw_value == 7.0);
  CHECK(spans[2].raw_value == 1999.0);
  CHECK(spans[0].start < spans[1].start);
  CHECK(spans[1].start < spans[2].start);
}
