#include "numline/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "numline/io.hpp"
#include "numline/rng.hpp"

namespace numline {

CorpusConfig CorpusConfig::defaults() {
  CorpusConfig cfg;
  auto add = [&](std::vector<std::string> tokens, double mean, double sd) {
    SentenceTemplate t;
    t.tokens = std::move(tokens);
    t.log10_mean = mean;
    t.log10_sd = sd;
    cfg.templates.push_back(std::move(t));
  };

  add({"the", "ant", "weighs", "[MASK]", "milligrams"}, 0.45, 0.14);
  add({"a", "movie", "ticket", "costs", "[MASK]", "dollars"}, 1.30, 0.15);
  add({"tigers", "weigh", "[MASK]", "lbs"}, 2.78, 0.12);

  {
    SentenceTemplate year;
    year.tokens = {"the", "film", "premiered", "in", "[MASK]", "."};
    year.year_like = true;
    cfg.templates.push_back(std::move(year));
  }

  add({"the", "festival", "drew", "[MASK]", "visitors"}, 4.40, 0.18);
  add({"the", "city", "has", "[MASK]", "residents"}, 5.50, 0.18);

  {
    // answer decade tracks the budget mentioned in the sentence
    SentenceTemplate firm;
    firm.tokens = {"the", "firm", "paid", "[MASK]", "dollars",
                   "out", "of",   "its",  "{NUM}",  "budget"};
    firm.log10_sd = 0.15;
    firm.variants = {{3000000.0, 4.5}, {40000000.0, 5.5}, {500000000.0, 6.5}};
    cfg.templates.push_back(std::move(firm));
  }

  add({"the", "asteroid", "passed", "[MASK]", "km", "from", "earth"}, 7.40, 0.15);
  // the last two run past the 8-token decimal rendering budget
  add({"the", "lottery", "jackpot", "reached", "[MASK]", "dollars"}, 8.50, 0.15);
  add({"the", "spacecraft", "traveled", "[MASK]", "km", "in", "total"}, 9.40, 0.15);
  return cfg;
}

namespace {

void validate_config(const CorpusConfig& cfg) {
  if (cfg.templates.size() < 5) {
    throw std::invalid_argument("corpus config: need at least 5 templates");
  }
  bool has_year = false;
  for (const auto& t : cfg.templates) {
    if (std::count(t.tokens.begin(), t.tokens.end(), kMaskToken) != 1) {
      throw std::invalid_argument("corpus config: each template needs exactly one [MASK]");
    }
    if (t.year_like) has_year = true;
    if (!t.year_like && t.variants.empty() && !(t.log10_sd > 0.0)) {
      throw std::invalid_argument("corpus config: log10_sd must be positive");
    }
    if (t.weight < 0.0) throw std::invalid_argument("corpus config: negative weight");
  }
  if (!has_year) throw std::invalid_argument("corpus config: need a year-like template");
}

MnpExample sample_example(const CorpusConfig& cfg, const std::vector<double>& cum_weights,
                          Rng& rng) {
  const double u = rng.uniform01() * cum_weights.back();
  const std::size_t ti = static_cast<std::size_t>(
      std::lower_bound(cum_weights.begin(), cum_weights.end(), u) - cum_weights.begin());
  const SentenceTemplate& t = cfg.templates[std::min(ti, cfg.templates.size() - 1)];

  MnpExample ex;
  double answer;
  double context = 0.0;
  if (t.year_like) {
    answer = std::round(std::clamp(rng.normal(2010.0, 9.0), 1991.0, 2029.0));
  } else {
    double mean = t.log10_mean;
    if (!t.variants.empty()) {
      const auto& v = t.variants[static_cast<std::size_t>(rng.below(t.variants.size()))];
      mean = v.log10_mean;
      context = v.context_value;
    }
    answer = std::round(std::pow(10.0, rng.normal(mean, t.log10_sd)));
    answer = std::clamp(answer, 1.0, 1e16);
  }
  ex.answer = answer;
  for (const auto& tok : t.tokens) {
    if (tok == "{NUM}") {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.0f", context);  // plain digits, no sci notation
      ex.tokens.emplace_back(buf);
    } else {
      ex.tokens.push_back(tok);
    }
  }
  for (const auto& tok : ex.tokens) {
    if (auto num = token_number(tok)) ex.context_numbers.push_back(*num);
  }
  return ex;
}

}  // namespace

std::optional<ParsedNumber> token_number(const std::string& token) {
  if (token.empty()) return std::nullopt;
  const char c = token.front();
  if (!(c >= '0' && c <= '9') && c != '-' && c != '+' && c != '.') return std::nullopt;
  const auto spans = extract(token);
  if (spans.size() == 1 && spans[0].surface == token && spans[0].status == ParseStatus::Ok) {
    return spans[0].parsed;
  }
  return std::nullopt;
}

Corpus gen_corpus(const CorpusConfig& config, std::uint64_t seed) {
  validate_config(config);
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& t : config.templates) {
    acc += t.weight;
    cum.push_back(acc);
  }
  if (!(acc > 0.0)) throw std::invalid_argument("corpus config: zero total weight");

  Rng rng(derive_seed(seed, 0xC0895));
  Corpus corpus;
  corpus.train.reserve(config.n_train);
  corpus.dev.reserve(config.n_dev);
  corpus.test.reserve(config.n_test);
  for (std::size_t i = 0; i < config.n_train; ++i) {
    corpus.train.push_back(sample_example(config, cum, rng));
  }
  for (std::size_t i = 0; i < config.n_dev; ++i) {
    corpus.dev.push_back(sample_example(config, cum, rng));
  }
  for (std::size_t i = 0; i < config.n_test; ++i) {
    corpus.test.push_back(sample_example(config, cum, rng));
  }
  return corpus;
}

MnpExample make_example(const std::string& text, double answer) {
  MnpExample ex;
  std::istringstream ss(text);
  std::string tok;
  int masks = 0;
  while (ss >> tok) {
    if (tok == kMaskToken) ++masks;
    ex.tokens.push_back(tok);
  }
  if (masks != 1) {
    throw std::invalid_argument("example: text must contain exactly one [MASK]: " + text);
  }
  if (!(answer >= kMinValue && answer <= kMaxValue)) {
    throw std::invalid_argument("example: answer outside [1, 1e16]");
  }
  ex.answer = answer;
  for (const auto& word : ex.tokens) {
    if (auto num = token_number(word)) ex.context_numbers.push_back(*num);
  }
  return ex;
}

void save_jsonl(const std::vector<MnpExample>& examples, const std::string& path) {
  std::string out;
  for (const auto& ex : examples) {
    nlohmann::json j;
    std::string text;
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (i) text += ' ';
      text += ex.tokens[i];
    }
    j["text"] = text;
    j["answer"] = ex.answer;
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

std::vector<MnpExample> load_jsonl(const std::string& path) {
  std::vector<MnpExample> examples;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": bad JSON line: " + e.what());
    }
    examples.push_back(make_example(j.at("text").get<std::string>(),
                                    j.at("answer").get<double>()));
  }
  return examples;
}

int count_decades(const std::vector<MnpExample>& examples) {
  std::set<int> decades;
  for (const auto& ex : examples) decades.insert(decompose(ex.answer).exponent);
  return static_cast<int>(decades.size());
}

}  // namespace numline
