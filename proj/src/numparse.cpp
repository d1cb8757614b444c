#include "numline/numparse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "numline/io.hpp"
#include "numline/mathutil.hpp"

namespace numline {

const char* to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Ok: return "ok";
    case ParseStatus::NonPositive: return "nonpositive";
    case ParseStatus::OutOfRange: return "out_of_range";
  }
  return "unknown";
}

ParsedNumber decompose(double value) {
  if (!std::isfinite(value) || value < kMinValue || value > kMaxValue) {
    throw std::out_of_range("decompose: value outside [1, 1e16]: " + format_double(value));
  }
  int e = static_cast<int>(std::floor(std::log10(value)));
  e = std::clamp(e, 0, 16);
  // log10 can land one decade off near boundaries (e.g. log10(1000) slightly
  // below 3); correct against exact powers.
  if (pow10i(e) > value) {
    --e;
  } else if (e < 16 && pow10i(e + 1) <= value) {
    ++e;
  }
  double m = value / pow10i(e);
  if (m >= 10.0) m = std::nextafter(10.0, 0.0);  // quotient rounding guard
  if (m < 1.0) m = 1.0;
  return ParsedNumber{value, e, m};
}

double recompose(int exponent, double mantissa) {
  if (exponent < 0 || exponent > 16 || !std::isfinite(mantissa)) {
    throw std::out_of_range("recompose: exponent outside [0, 16] or bad mantissa");
  }
  if (exponent == 16) {
    if (mantissa != 1.0) {
      throw std::out_of_range("recompose: exponent 16 only admits mantissa 1");
    }
  } else if (mantissa < 1.0 || mantissa >= 10.0) {
    throw std::out_of_range("recompose: mantissa outside [1, 10): " + format_double(mantissa));
  }
  return mantissa * pow10i(exponent);
}

namespace {

bool ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool ascii_alnum(char c) {
  return ascii_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::vector<NumberSpan> extract(std::string_view text) {
  std::vector<NumberSpan> spans;
  const std::size_t n = text.size();
  auto digit_at = [&](std::size_t p) { return p < n && ascii_digit(text[p]); };

  std::size_t i = 0;
  while (i < n) {
    const char c = text[i];
    const bool prev_joins = i > 0 && (ascii_alnum(text[i - 1]) || text[i - 1] == '.');
    bool starts = false;
    if (ascii_digit(c)) {
      starts = true;
    } else if ((c == '-' || c == '+') && digit_at(i + 1) && !prev_joins) {
      starts = true;  // sign binds only after a word boundary ("2010-2015" stays a range)
    } else if (c == '.' && digit_at(i + 1) && !prev_joins) {
      starts = true;  // bare leading-dot fraction, flagged below as < 1
    }
    if (!starts) {
      ++i;
      continue;
    }

    const std::size_t start = i;
    std::size_t j = i;
    bool negative = false;
    std::string literal;  // normalized: sign/commas stripped, "0." prefixed
    if (text[j] == '-' || text[j] == '+') {
      negative = text[j] == '-';
      ++j;
    }
    if (text[j] == '.') {
      literal = "0.";
      ++j;
      while (digit_at(j)) literal += text[j++];
    } else {
      const std::size_t int_start = j;
      while (digit_at(j)) literal += text[j++];
      const std::size_t int_len = j - int_start;
      if (int_len >= 1 && int_len <= 3) {
        // "," separates groups of exactly three digits
        while (j < n && text[j] == ',' && digit_at(j + 1) && digit_at(j + 2) &&
               digit_at(j + 3) && !digit_at(j + 4)) {
          literal.append(text.substr(j + 1, 3));
          j += 4;
        }
      }
      if (j < n && text[j] == '.' && digit_at(j + 1)) {
        literal += '.';
        ++j;
        while (digit_at(j)) literal += text[j++];
      }
    }
    if (j < n && (text[j] == 'e' || text[j] == 'E')) {
      std::size_t k = j + 1;
      std::string suffix = "e";
      if (k < n && (text[k] == '+' || text[k] == '-')) suffix += text[k++];
      if (digit_at(k)) {
        while (digit_at(k)) suffix += text[k++];
        literal += suffix;
        j = k;
      }
    }

    NumberSpan span;
    span.start = start;
    span.end = j;
    span.surface = std::string(text.substr(start, j - start));

    double v = 0.0;
    auto res = std::from_chars(literal.data(), literal.data() + literal.size(), v);
    if (res.ec == std::errc::result_out_of_range) {
      // overflow to huge or underflow toward zero; decide by the exponent sign
      const bool tiny = literal.find("e-") != std::string::npos;
      v = tiny ? std::numeric_limits<double>::min()
               : std::numeric_limits<double>::infinity();
    }
    if (negative) v = -v;
    span.raw_value = v;
    if (negative || v == 0.0) {
      span.status = ParseStatus::NonPositive;
    } else if (!std::isfinite(v) || v < kMinValue || v > kMaxValue) {
      span.status = ParseStatus::OutOfRange;
    } else {
      span.status = ParseStatus::Ok;
      span.parsed = decompose(v);
    }
    spans.push_back(std::move(span));
    i = j;
  }
  return spans;
}

}  // namespace numline
