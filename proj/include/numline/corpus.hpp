#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "numline/numparse.hpp"

namespace numline {

/// One masked-number-prediction instance: word tokens with exactly one
/// [MASK], the numeric answer, and any in-text numbers (encoded on the input
/// side through exponent features).
struct MnpExample {
  std::vector<std::string> tokens;
  double answer = 1.0;
  std::vector<ParsedNumber> context_numbers;
};

inline constexpr const char* kMaskToken = "[MASK]";

/// A sentence template whose masked value is log-normal in base-10 space.
/// Year-like templates draw calendar years instead (mantissa mass near 2).
/// A "{NUM}" token, when present, is substituted with a context number drawn
/// from `variants`, and the answer decade follows that variant's mean.
struct SentenceTemplate {
  std::vector<std::string> tokens;  // contains exactly one [MASK]
  double log10_mean = 0.0;
  double log10_sd = 0.15;
  bool year_like = false;
  double weight = 1.0;

  struct Variant {
    double context_value = 0.0;
    double log10_mean = 0.0;
  };
  std::vector<Variant> variants;
};

struct CorpusConfig {
  std::size_t n_train = 20000;
  std::size_t n_dev = 2000;
  std::size_t n_test = 2000;
  std::vector<SentenceTemplate> templates;

  /// Ten templates spanning decades 0..9 (two of them past the 8-token
  /// decimal budget), a year template, and one context-number template.
  static CorpusConfig defaults();
};

struct Corpus {
  std::vector<MnpExample> train, dev, test;
};

/// Deterministic under the seed: the same (config, seed) reproduces the
/// corpus byte for byte. Throws std::invalid_argument for configs without
/// at least 5 templates or without a year-like template.
Corpus gen_corpus(const CorpusConfig& config, std::uint64_t seed);

/// JSON-lines round trip: {"text": "... [MASK] ...", "answer": number}.
void save_jsonl(const std::vector<MnpExample>& examples, const std::string& path);
std::vector<MnpExample> load_jsonl(const std::string& path);

/// Rebuilds an example from raw text + answer (tokens split on whitespace,
/// context numbers extracted). Throws std::invalid_argument unless the text
/// carries exactly one [MASK] and the answer is in [1, 1e16].
MnpExample make_example(const std::string& text, double answer);

/// The number a token denotes, when the whole token is one in-range literal.
std::optional<ParsedNumber> token_number(const std::string& token);

/// Number of distinct answer decades across a split.
int count_decades(const std::vector<MnpExample>& examples);

}  // namespace numline
