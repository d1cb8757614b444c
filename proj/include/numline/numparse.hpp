#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace numline {

inline constexpr double kMinValue = 1.0;
inline constexpr double kMaxValue = 1e16;
inline constexpr int kNumDecades = 17;  // exponents 0..16

/// A positive real with its canonical decade decomposition:
/// value == mantissa * 10^exponent, mantissa in [1, 10), exponent in [0, 16].
/// The closed upper boundary 1e16 maps to (exponent=16, mantissa=1).
struct ParsedNumber {
  double value = 1.0;
  int exponent = 0;
  double mantissa = 1.0;
};

enum class ParseStatus {
  Ok,           // positive and inside [1, 1e16]
  NonPositive,  // zero or negative literal
  OutOfRange,   // positive but below 1 or above 1e16 (or overflowed)
};

const char* to_string(ParseStatus s);

/// A numeric literal found in raw text. Offsets are byte offsets into the
/// input and `surface` equals the slice [start, end). `parsed` is present
/// only when status == Ok; flagged literals are reported, never dropped.
struct NumberSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
  double raw_value = 0.0;
  ParseStatus status = ParseStatus::Ok;
  std::optional<ParsedNumber> parsed;
};

/// Decade decomposition. Throws std::out_of_range for non-finite input or
/// values outside [1, 1e16]; out-of-range signals corpus corruption and is
/// rejected rather than clamped.
ParsedNumber decompose(double value);

/// Inverse of decompose. Requires exponent in [0, 16] and mantissa in
/// [1, 10), except exponent == 16 which only admits mantissa == 1.
/// Throws std::out_of_range on violated preconditions.
double recompose(int exponent, double mantissa);

/// All maximal numeric literals in left-to-right order. Handles thousands
/// separators ("," between groups of exactly 3 digits), decimal points, and
/// NeM / N.NeM scientific literals; a leading currency symbol is simply not
/// part of the literal. Signed, zero and out-of-range literals come back
/// flagged via ParseStatus.
std::vector<NumberSpan> extract(std::string_view text);

}  // namespace numline
