#include "numline/notation.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace numline {

const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Decimal: return "decimal";
    case SchemeKind::Digits: return "digits";
    case SchemeKind::Scientific: return "scientific";
    case SchemeKind::NumBert: return "numbert";
  }
  return "unknown";
}

NotationScheme NotationScheme::decimal(int pad_len) {
  NotationScheme s{SchemeKind::Decimal, pad_len, "[PAD]", "e"};
  s.validate();
  return s;
}

NotationScheme NotationScheme::digits(int pad_len) {
  NotationScheme s{SchemeKind::Digits, pad_len, "[PAD]", "e"};
  s.validate();
  return s;
}

NotationScheme NotationScheme::scientific(int pad_len) {
  NotationScheme s{SchemeKind::Scientific, pad_len, "[PAD]", "e"};
  s.validate();
  return s;
}

NotationScheme NotationScheme::numbert(int pad_len, std::string separator) {
  NotationScheme s{SchemeKind::NumBert, pad_len, "[PAD]", std::move(separator)};
  s.validate();
  return s;
}

void NotationScheme::validate() const {
  if (pad_len < 1) throw std::invalid_argument("notation: pad_len must be positive");
  if (pad_token.empty() || exp_separator.empty()) {
    throw std::invalid_argument("notation: empty pad or separator token");
  }
  int min_pad = 1;
  switch (kind) {
    case SchemeKind::Decimal: min_pad = 1; break;
    case SchemeKind::Digits: min_pad = 17; break;      // 17-digit integers
    case SchemeKind::Scientific: min_pad = 8; break;   // "9.999" + sep + "16"
    case SchemeKind::NumBert: min_pad = 4; break;      // lead + sep + rest + exp
  }
  if (pad_len < min_pad) {
    throw std::invalid_argument(std::string("notation: pad_len too small for ") +
                                to_string(kind) + " (needs >= " + std::to_string(min_pad) + ")");
  }
}

namespace {

// Shortest fixed-notation decimal that round-trips the double.
std::string fixed_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

// Mantissa in [1, 10) rounded to at most 4 significant digits, trailing
// zeros stripped. carry means it rounded up to 10 and the exponent must bump.
struct Mantissa4 {
  std::string digits;
  bool carry = false;
};

Mantissa4 mantissa4(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", m);
  std::string s(buf);
  if (s.size() >= 2 && s[0] == '1' && s[1] == '0') return {"1", true};
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return {s, false};
}

void push_chars(std::vector<std::string>& tokens, const std::string& s) {
  for (char c : s) tokens.emplace_back(1, c);
}

bool single_char_of(const std::string& tok, const char* allowed) {
  if (tok.size() != 1) return false;
  for (const char* p = allowed; *p; ++p) {
    if (tok[0] == *p) return true;
  }
  return false;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

NumberToken render_number(const NotationScheme& scheme, const ParsedNumber& n) {
  scheme.validate();
  std::vector<std::string> tokens;
  switch (scheme.kind) {
    case SchemeKind::Decimal:
    case SchemeKind::Digits: {
      push_chars(tokens, fixed_string(n.value));
      break;
    }
    case SchemeKind::Scientific: {
      const Mantissa4 m = mantissa4(n.mantissa);
      const int e = n.exponent + (m.carry ? 1 : 0);
      push_chars(tokens, m.digits);
      tokens.push_back(scheme.exp_separator);
      push_chars(tokens, std::to_string(e));
      break;
    }
    case SchemeKind::NumBert: {
      const Mantissa4 m = mantissa4(n.mantissa);
      const int e = n.exponent + (m.carry ? 1 : 0);
      if (scheme.exp_separator == "x") {
        // split-mantissa template: {lead} x {rest} {exp}
        const std::string lead(1, m.digits[0]);
        const std::string rest = m.digits.size() > 2 ? m.digits.substr(2) : "0";
        tokens = {lead, "x", rest, std::to_string(e)};
      } else {
        std::string significand(1, m.digits[0]);
        if (m.digits.size() > 2) significand += m.digits.substr(2);
        tokens = {significand, scheme.exp_separator, std::to_string(e)};
      }
      break;
    }
  }
  if (static_cast<int>(tokens.size()) > scheme.pad_len) {
    throw std::overflow_error("notation: rendering of " + fixed_string(n.value) +
                              " exceeds pad length " + std::to_string(scheme.pad_len));
  }
  while (static_cast<int>(tokens.size()) < scheme.pad_len) tokens.push_back(scheme.pad_token);
  return NumberToken{std::move(tokens), scheme};
}

NumberToken to_digits(const ParsedNumber& n) {
  return render_number(NotationScheme::digits(), n);
}

NumberToken to_scientific(const ParsedNumber& n) {
  return render_number(NotationScheme::scientific(), n);
}

std::optional<ParsedNumber> parse_tokens(const NumberToken& t) {
  const NotationScheme& scheme = t.scheme;
  // pads may only appear as a suffix
  std::size_t content_len = t.tokens.size();
  while (content_len > 0 && t.tokens[content_len - 1] == scheme.pad_token) --content_len;
  for (std::size_t i = 0; i < content_len; ++i) {
    if (t.tokens[i] == scheme.pad_token) return std::nullopt;
  }
  if (content_len == 0) return std::nullopt;

  std::string literal;
  switch (scheme.kind) {
    case SchemeKind::Decimal:
    case SchemeKind::Digits: {
      for (std::size_t i = 0; i < content_len; ++i) {
        const std::string& tok = t.tokens[i];
        if (!single_char_of(tok, "0123456789.")) return std::nullopt;
        literal += tok;
      }
      break;
    }
    case SchemeKind::Scientific: {
      std::size_t sep = content_len;
      for (std::size_t i = 0; i < content_len; ++i) {
        if (t.tokens[i] == scheme.exp_separator) {
          if (sep != content_len) return std::nullopt;  // multiple separators
          sep = i;
        }
      }
      if (sep == content_len || sep == 0) return std::nullopt;  // missing sep / empty mantissa
      std::string mant, exp;
      for (std::size_t i = 0; i < sep; ++i) {
        if (!single_char_of(t.tokens[i], "0123456789.")) return std::nullopt;
        mant += t.tokens[i];
      }
      for (std::size_t i = sep + 1; i < content_len; ++i) {
        if (!single_char_of(t.tokens[i], "0123456789")) return std::nullopt;
        exp += t.tokens[i];
      }
      if (exp.empty()) return std::nullopt;
      literal = mant + "e" + exp;
      break;
    }
    case SchemeKind::NumBert: {
      if (scheme.exp_separator == "x") {
        if (content_len != 4) return std::nullopt;
        const std::string& lead = t.tokens[0];
        const std::string& rest = t.tokens[2];
        const std::string& exp = t.tokens[3];
        if (t.tokens[1] != "x") return std::nullopt;
        if (!single_char_of(lead, "0123456789")) return std::nullopt;
        if (!all_digits(rest) || !all_digits(exp)) return std::nullopt;
        literal = lead + "." + rest + "e" + exp;
      } else {
        if (content_len != 3) return std::nullopt;
        const std::string& sig = t.tokens[0];
        const std::string& exp = t.tokens[2];
        if (t.tokens[1] != scheme.exp_separator) return std::nullopt;
        if (!all_digits(sig) || !all_digits(exp)) return std::nullopt;
        literal = sig.substr(0, 1);
        if (sig.size() > 1) literal += "." + sig.substr(1);
        literal += "e" + exp;
      }
      break;
    }
  }

  double v = 0.0;
  auto res = std::from_chars(literal.data(), literal.data() + literal.size(), v);
  if (res.ec != std::errc{} || res.ptr != literal.data() + literal.size()) return std::nullopt;
  if (!std::isfinite(v) || v < kMinValue || v > kMaxValue) return std::nullopt;
  const ParsedNumber parsed = decompose(v);

  // Strict inverse: the sequence must be exactly what the renderer emits.
  try {
    const NumberToken round = render_number(scheme, parsed);
    std::size_t round_len = round.tokens.size();
    while (round_len > 0 && round.tokens[round_len - 1] == scheme.pad_token) --round_len;
    if (round_len != content_len) return std::nullopt;
    for (std::size_t i = 0; i < content_len; ++i) {
      if (round.tokens[i] != t.tokens[i]) return std::nullopt;
    }
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
  return parsed;
}

std::vector<std::string> scheme_vocabulary(const NotationScheme& scheme) {
  std::vector<std::string> vocab;
  for (char c = '0'; c <= '9'; ++c) vocab.emplace_back(1, c);
  vocab.emplace_back(".");
  switch (scheme.kind) {
    case SchemeKind::Decimal:
    case SchemeKind::Digits:
      break;
    case SchemeKind::Scientific:
      vocab.push_back(scheme.exp_separator);
      break;
    case SchemeKind::NumBert:
      // token heads do not use this scheme; inventory kept for completeness
      vocab.push_back(scheme.exp_separator);
      break;
  }
  vocab.push_back(scheme.pad_token);
  return vocab;
}

}  // namespace numline
