#pragma once

#include <optional>
#include <string>
#include <vector>

#include "numline/numparse.hpp"

namespace numline {

enum class SchemeKind { Decimal, Digits, Scientific, NumBert };

const char* to_string(SchemeKind k);

/// A token-level number notation. Rendered sequences are always right-padded
/// to exactly pad_len tokens with a reserved pad token (never "0" — digit
/// padding would corrupt parsed magnitudes).
///
/// Scientific mantissas carry at most 4 significant digits so that
/// mantissa + separator + a two-digit exponent fits the 8-token budget.
struct NotationScheme {
  SchemeKind kind = SchemeKind::Decimal;
  int pad_len = 8;
  std::string pad_token = "[PAD]";
  std::string exp_separator = "e";  // NumBert: "[EXP]", or "x" for the
                                    // split-mantissa template variant

  static NotationScheme decimal(int pad_len = 8);
  static NotationScheme digits(int pad_len = 17);
  static NotationScheme scientific(int pad_len = 8);
  static NotationScheme numbert(int pad_len = 8, std::string separator = "[EXP]");

  /// Throws std::invalid_argument when pad_len cannot hold the scheme's
  /// longest emission (Digits needs >= 17, Scientific >= 8, NumBert >= 4).
  /// Decimal has no floor: short pads simply overflow at render time, which
  /// is the subword baseline's capacity limit.
  void validate() const;

  bool operator==(const NotationScheme&) const = default;
};

struct NumberToken {
  std::vector<std::string> tokens;
  NotationScheme scheme;
};

/// Renders a number under the scheme. Throws std::overflow_error when the
/// token sequence would exceed pad_len.
NumberToken render_number(const NotationScheme& scheme, const ParsedNumber& n);

/// Digit-sequence notation at pad 17: 600 -> "6" "0" "0" + pads.
NumberToken to_digits(const ParsedNumber& n);

/// Scientific notation at pad 8: 600 -> "6" "e" "2" + pads.
NumberToken to_scientific(const ParsedNumber& n);

/// Strict inverse of render_number: any sequence the renderer could not have
/// produced (stray pads mid-number, multiple separators, empty mantissa,
/// non-canonical digits, out-of-range value) yields nullopt instead of a
/// number. Callers count nullopt toward the >= 50% NA rule.
std::optional<ParsedNumber> parse_tokens(const NumberToken& t);

/// Token inventory a renderer may emit under the scheme, pad token last.
/// This is also the fixed character-level output vocabulary used by the
/// token decoder heads.
std::vector<std::string> scheme_vocabulary(const NotationScheme& scheme);

}  // namespace numline
