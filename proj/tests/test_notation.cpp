#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "numline/mathutil.hpp"
#include "numline/notation.hpp"
#include "numline/rng.hpp"

using namespace numline;

namespace {

std::vector<std::string> stripped(const NumberToken& t) {
  std::vector<std::string> out;
  for (const auto& tok : t.tokens) {
    if (tok == t.scheme.pad_token) break;
    out.push_back(tok);
  }
  return out;
}

}  // namespace

TEST_CASE("digit rendering: 600 becomes 6 0 0") {
  const NumberToken t = to_digits(decompose(600.0));
  REQUIRE(t.tokens.size() == 17);
  CHECK(stripped(t) == std::vector<std::string>{"6", "0", "0"});
  CHECK(t.tokens[3] == "[PAD]");
}

TEST_CASE("digit rendering boundary cases") {
  CHECK(stripped(to_digits(decompose(1.0))) == std::vector<std::string>{"1"});

  // 10^16 exactly fills the 17-token budget
  const NumberToken top = to_digits(decompose(1e16));
  CHECK(stripped(top).size() == 17);
  CHECK(top.tokens[0] == "1");
  for (int i = 1; i < 17; ++i) CHECK(top.tokens[static_cast<std::size_t>(i)] == "0");

  // non-integers keep the "." token
  CHECK(stripped(to_digits(decompose(6.5))) == std::vector<std::string>{"6", ".", "5"});
}

TEST_CASE("scientific rendering: 6e2") {
  const NumberToken t = to_scientific(decompose(600.0));
  REQUIRE(t.tokens.size() == 8);
  CHECK(stripped(t) == std::vector<std::string>{"6", "e", "2"});

  CHECK(stripped(to_scientific(decompose(1.0))) == std::vector<std::string>{"1", "e", "0"});
  CHECK(stripped(to_scientific(decompose(1e16))) ==
        std::vector<std::string>{"1", "e", "1", "6"});
}

TEST_CASE("scientific mantissa keeps at most four significant digits") {
  CHECK(stripped(to_scientific(decompose(316.22776601))) ==
        std::vector<std::string>{"3", ".", "1", "6", "2", "e", "2"});
  // rounding to four digits can carry into the next decade
  CHECK(stripped(to_scientific(decompose(999999.0))) == std::vector<std::string>{"1", "e", "6"});
}

TEST_CASE("numbert rendering: 329 [EXP] 2") {
  const NotationScheme scheme = NotationScheme::numbert();
  const NumberToken t = render_number(scheme, decompose(329.0));
  CHECK(stripped(t) == std::vector<std::string>{"329", "[EXP]", "2"});

  CHECK(stripped(render_number(scheme, decompose(600.0))) ==
        std::vector<std::string>{"6", "[EXP]", "2"});
  CHECK(stripped(render_number(scheme, decompose(1.63))) ==
        std::vector<std::string>{"163", "[EXP]", "0"});
}

TEST_CASE("numbert split-mantissa template behind the x separator") {
  const NotationScheme scheme = NotationScheme::numbert(8, "x");
  CHECK(stripped(render_number(scheme, decompose(329.0))) ==
        std::vector<std::string>{"3", "x", "29", "2"});
  CHECK(stripped(render_number(scheme, decompose(600.0))) ==
        std::vector<std::string>{"6", "x", "0", "2"});

  for (double v : {1.0, 5.0, 62.0, 329.0, 4410.0, 1.63, 9.999e15}) {
    const NumberToken t = render_number(scheme, decompose(v));
    const auto parsed = parse_tokens(t);
    REQUIRE(parsed.has_value());
    CHECK(render_number(scheme, *parsed).tokens == t.tokens);
  }
}

TEST_CASE("every rendered sequence has exactly pad_len tokens") {
  Rng rng(7781);
  const NotationScheme schemes[] = {
      NotationScheme::digits(),
      NotationScheme::scientific(),
      NotationScheme::numbert(),
  };
  for (int i = 0; i < 500; ++i) {
    const double v = std::round(std::pow(10.0, rng.uniform(0.0, 15.9)));
    for (const auto& scheme : schemes) {
      CHECK(render_number(scheme, decompose(std::max(1.0, v))).tokens.size() ==
            static_cast<std::size_t>(scheme.pad_len));
    }
  }
}

TEST_CASE("parse inverts rendering") {
  const auto parsed = parse_tokens(to_scientific(decompose(600.0)));
  REQUIRE(parsed.has_value());
  CHECK(parsed->value == 600.0);

  const auto digits = parse_tokens(to_digits(decompose(600.0)));
  REQUIRE(digits.has_value());
  CHECK(digits->value == 600.0);
  CHECK(digits->exponent == 2);
}

TEST_CASE("parse rejects grammar violations") {
  const NotationScheme sci = NotationScheme::scientific();
  auto seq = [&](std::vector<std::string> toks, const NotationScheme& s) {
    while (toks.size() < static_cast<std::size_t>(s.pad_len)) toks.push_back(s.pad_token);
    return NumberToken{std::move(toks), s};
  };

  // empty mantissa
  CHECK(!parse_tokens(seq({"e", "2"}, sci)).has_value());
  // mid-sequence pad
  CHECK(!parse_tokens(NumberToken{{"6", "[PAD]", "e", "2", "[PAD]", "[PAD]", "[PAD]", "[PAD]"}, sci})
             .has_value());
  // multiple separators
  CHECK(!parse_tokens(seq({"6", "e", "2", "e", "1"}, sci)).has_value());
  // missing exponent
  CHECK(!parse_tokens(seq({"6", "e"}, sci)).has_value());
  // non-canonical: leading zero, exponent padding, trailing mantissa zero
  CHECK(!parse_tokens(seq({"0", "6", "e", "2"}, sci)).has_value());
  CHECK(!parse_tokens(seq({"6", "e", "0", "2"}, sci)).has_value());
  CHECK(!parse_tokens(seq({"6", ".", "5", "0", "e", "2"}, sci)).has_value());
  // five significant digits can never come out of the renderer
  CHECK(!parse_tokens(seq({"9", ".", "9", "9", "9", "9", "e", "2"}, sci)).has_value());
  // all pads
  CHECK(!parse_tokens(seq({}, sci)).has_value());

  const NotationScheme dig = NotationScheme::digits();
  CHECK(!parse_tokens(seq({"0", "6"}, dig)).has_value());
  CHECK(!parse_tokens(seq({"6", ".", "5", "."}, dig)).has_value());
  CHECK(!parse_tokens(seq({"6", ".", "5", ".", "2"}, dig)).has_value());
  CHECK(!parse_tokens(seq({"0"}, dig)).has_value());  // zero is out of range

  const NotationScheme nb = NotationScheme::numbert();
  CHECK(!parse_tokens(seq({"[EXP]", "2"}, nb)).has_value());
  CHECK(!parse_tokens(seq({"329", "[EXP]"}, nb)).has_value());
  CHECK(!parse_tokens(seq({"3290", "[EXP]", "2"}, nb)).has_value());  // trailing zero
}

TEST_CASE("parse never returns a value outside the range") {
  const NotationScheme sci = NotationScheme::scientific();
  auto seq = [&](std::vector<std::string> toks) {
    while (toks.size() < 8) toks.push_back(sci.pad_token);
    return NumberToken{std::move(toks), sci};
  };
  // 9.999e16 > 1e16
  CHECK(!parse_tokens(seq({"9", ".", "9", "9", "9", "e", "1", "6"})).has_value());
  // exponent 17
  CHECK(!parse_tokens(seq({"1", "e", "1", "7"})).has_value());
}

TEST_CASE("render rejects overflow") {
  // 9 digits cannot fit an 8-token decimal budget
  CHECK_THROWS_AS(render_number(NotationScheme::decimal(8), decompose(123456789.0)),
                  std::overflow_error);
  CHECK_NOTHROW(render_number(NotationScheme::decimal(8), decompose(12345678.0)));
}

TEST_CASE("scheme validation enforces pad floors") {
  CHECK_THROWS_AS(NotationScheme::digits(16), std::invalid_argument);
  CHECK_THROWS_AS(NotationScheme::scientific(7), std::invalid_argument);
  CHECK_NOTHROW(NotationScheme::decimal(2));
}

TEST_CASE("round trip is value-exact for four-significant-digit integers") {
  Rng rng(40117);
  const NotationScheme schemes[] = {
      NotationScheme::digits(),
      NotationScheme::scientific(),
      NotationScheme::numbert(),
      NotationScheme::numbert(8, "x"),
  };
  for (int i = 0; i < 2000; ++i) {
    double v = std::round(std::pow(10.0, rng.uniform(0.0, 15.99)));
    v = std::max(1.0, v);
    const ParsedNumber n = decompose(v);
    // keep four significant digits so every scheme can carry the value
    const double scale = pow10i(std::max(0, n.exponent - 3));
    const double value = std::max(scale, std::round(v / scale) * scale);
    for (const auto& scheme : schemes) {
      const auto parsed = parse_tokens(render_number(scheme, decompose(value)));
      REQUIRE(parsed.has_value());
      CHECK(parsed->value == value);
    }
  }
}

TEST_CASE("token-level round trip is idempotent for arbitrary integers") {
  Rng rng(90217);
  const NotationScheme schemes[] = {
      NotationScheme::digits(),
      NotationScheme::scientific(),
      NotationScheme::numbert(),
  };
  for (int i = 0; i < 2000; ++i) {
    const double v = std::max(1.0, std::round(std::pow(10.0, rng.uniform(0.0, 15.99))));
    for (const auto& scheme : schemes) {
      const NumberToken t = render_number(scheme, decompose(v));
      const auto parsed = parse_tokens(t);
      REQUIRE(parsed.has_value());
      // digits are lossless; the 4-digit schemes reproduce their own rendering
      if (scheme.kind == SchemeKind::Digits) CHECK(parsed->value == v);
      CHECK(render_number(scheme, *parsed).tokens == t.tokens);
    }
  }
}
