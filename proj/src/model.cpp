#include "numline/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "numline/binning.hpp"
#include "numline/dexp.hpp"
#include "numline/mathutil.hpp"

namespace numline {

using nlohmann::json;

const char* to_string(HeadKind k) {
  switch (k) {
    case HeadKind::SubwordPad8: return "subword";
    case HeadKind::DigitPad17: return "digit";
    case HeadKind::ScientificPad8: return "scientific";
    case HeadKind::VocabAM: return "vocab-am";
    case HeadKind::VocabGM: return "vocab-gm";
    case HeadKind::DExp: return "dexp";
    case HeadKind::ConstMean: return "const-mean";
    case HeadKind::ConstMedian: return "const-median";
    case HeadKind::ConstMode: return "const-mode";
  }
  return "unknown";
}

HeadKind head_kind_from_string(const std::string& name) {
  for (HeadKind k : all_head_kinds()) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown head kind: " + name);
}

bool is_constant_head(HeadKind k) {
  return k == HeadKind::ConstMean || k == HeadKind::ConstMedian || k == HeadKind::ConstMode;
}

const std::vector<HeadKind>& all_head_kinds() {
  static const std::vector<HeadKind> kinds = {
      HeadKind::ConstMean,  HeadKind::ConstMedian,    HeadKind::ConstMode,
      HeadKind::SubwordPad8, HeadKind::DigitPad17,    HeadKind::ScientificPad8,
      HeadKind::VocabAM,     HeadKind::VocabGM,       HeadKind::DExp,
  };
  return kinds;
}

void TrainConfig::validate() const {
  if (batch_size < 1 || max_epochs < 1 || patience < 1) {
    throw std::invalid_argument("train config: batch_size, max_epochs, patience must be positive");
  }
  if (patience >= max_epochs) {
    throw std::invalid_argument("train config: patience must be smaller than max_epochs");
  }
  if (!(lr_pretrained > 0.0) || !(lr_new > 0.0)) {
    throw std::invalid_argument("train config: learning rates must be positive");
  }
}

void Param::init_uniform(Rng& rng, double scale) {
  for (double& x : w) x = rng.uniform(-scale, scale);
  g.assign(w.size(), 0.0);
}

void Param::zero_grad() { g.assign(w.size(), 0.0); }

int WordVocab::add(const std::string& word) {
  auto it = index.find(word);
  if (it != index.end()) return it->second;
  const int id = static_cast<int>(words.size());
  words.push_back(word);
  index.emplace(word, id);
  return id;
}

int WordVocab::lookup(const std::string& word) const {
  auto it = index.find(word);
  return it == index.end() ? 0 : it->second;
}

WordVocab WordVocab::build(const Corpus& corpus) {
  WordVocab v;
  v.add("[UNK]");
  auto scan = [&](const std::vector<MnpExample>& split) {
    for (const auto& ex : split) {
      for (const auto& tok : ex.tokens) {
        if (!token_number(tok)) v.add(tok);
      }
    }
  };
  scan(corpus.train);
  scan(corpus.dev);
  scan(corpus.test);
  return v;
}

ContextEncoder::ContextEncoder(WordVocab vocab, int dim, Rng& rng)
    : vocab_(std::move(vocab)), dim_(dim) {
  // mean pooling divides per-component variance by the sentence length, so
  // the tables start wide enough for pooled vectors to keep O(1) components
  constexpr double kInitScale = 1.5;
  word_emb_.name = "encoder.word_emb";
  word_emb_.pretrained_group = true;
  word_emb_.w.resize(vocab_.words.size() * static_cast<std::size_t>(dim));
  word_emb_.init_uniform(rng, kInitScale);
  exp_emb_.name = "encoder.exp_emb";
  exp_emb_.pretrained_group = true;
  exp_emb_.w.resize(static_cast<std::size_t>(kNumDecades) * static_cast<std::size_t>(dim));
  exp_emb_.init_uniform(rng, kInitScale);
}

void ContextEncoder::encode(const MnpExample& ex, std::span<double> h) const {
  std::fill(h.begin(), h.end(), 0.0);
  if (ex.tokens.empty()) return;
  const std::size_t d = static_cast<std::size_t>(dim_);
  for (const auto& tok : ex.tokens) {
    const double* row;
    if (auto num = token_number(tok)) {
      row = exp_emb_.w.data() + static_cast<std::size_t>(num->exponent) * d;
    } else {
      row = word_emb_.w.data() + static_cast<std::size_t>(vocab_.lookup(tok)) * d;
    }
    for (std::size_t i = 0; i < d; ++i) h[i] += row[i];
  }
  const double inv = 1.0 / static_cast<double>(ex.tokens.size());
  for (std::size_t i = 0; i < d; ++i) h[i] *= inv;
}

void ContextEncoder::backward(const MnpExample& ex, std::span<const double> dh) {
  if (ex.tokens.empty()) return;
  const std::size_t d = static_cast<std::size_t>(dim_);
  const double inv = 1.0 / static_cast<double>(ex.tokens.size());
  for (const auto& tok : ex.tokens) {
    double* grad;
    if (auto num = token_number(tok)) {
      grad = exp_emb_.g.data() + static_cast<std::size_t>(num->exponent) * d;
    } else {
      grad = word_emb_.g.data() + static_cast<std::size_t>(vocab_.lookup(tok)) * d;
    }
    for (std::size_t i = 0; i < d; ++i) grad[i] += dh[i] * inv;
  }
}

std::vector<Param*> ContextEncoder::params() { return {&word_emb_, &exp_emb_}; }

bool DecoderHead::has_target(double) const { return true; }
void DecoderHead::fit(std::span<const double>) {}
void DecoderHead::set_extra_state(const std::string&) {}

namespace {

double clamp_range(double v) { return std::clamp(v, kMinValue, kMaxValue); }

// softmax cross entropy over a small logit vector; returns loss, optionally
// writes dlogits = softmax - onehot(target)
double softmax_ce(std::span<const double> logits, int target, double* dlogits) {
  const double lse = log_sum_exp(logits.data(), logits.size());
  if (dlogits != nullptr) {
    for (std::size_t i = 0; i < logits.size(); ++i) dlogits[i] = std::exp(logits[i] - lse);
    dlogits[static_cast<std::size_t>(target)] -= 1.0;
  }
  return lse - logits[static_cast<std::size_t>(target)];
}

// --- token-sequence heads: every pad position carries its own linear
// classifier over the character vocabulary (position identity enters through
// the per-position weights/bias; a shared projection plus additive position
// embeddings trains far too slowly at this scale because the character
// weights interfere across positions) ---
class TokenHead final : public DecoderHead {
 public:
  TokenHead(HeadKind kind, NotationScheme scheme, int dim, Rng& rng)
      : kind_(kind), scheme_(std::move(scheme)), dim_(dim) {
    vocab_ = scheme_vocabulary(scheme_);
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      index_.emplace(vocab_[i], static_cast<int>(i));
    }
    const std::size_t v = vocab_.size();
    const std::size_t d = static_cast<std::size_t>(dim_);
    const std::size_t positions = static_cast<std::size_t>(scheme_.pad_len);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    W_.name = "head.token_w";  // positions x vocab x dim
    W_.w.resize(positions * v * d);
    W_.init_uniform(rng, scale);
    b_.name = "head.token_b";  // positions x vocab
    b_.w.assign(positions * v, 0.0);
    b_.zero_grad();
  }

  HeadKind kind() const override { return kind_; }

  bool has_target(double answer) const override {
    std::vector<int> ids;
    return target_ids(answer, ids);
  }

  double loss(std::span<const double> h, double answer) const override {
    std::vector<int> ids;
    if (!target_ids(answer, ids)) return 0.0;
    std::vector<double> logits(vocab_.size());
    double total = 0.0;
    for (int p = 0; p < scheme_.pad_len; ++p) {
      position_logits(h, p, logits);
      total += softmax_ce(logits, ids[static_cast<std::size_t>(p)], nullptr);
    }
    return total;
  }

  double loss_and_grad(std::span<const double> h, double answer,
                       std::span<double> dh) override {
    std::vector<int> ids;
    if (!target_ids(answer, ids)) return 0.0;
    const std::size_t v = vocab_.size();
    const std::size_t d = static_cast<std::size_t>(dim_);
    std::vector<double> logits(v), dlogits(v);
    double total = 0.0;
    for (int p = 0; p < scheme_.pad_len; ++p) {
      position_logits(h, p, logits);
      total += softmax_ce(logits, ids[static_cast<std::size_t>(p)], dlogits.data());
      const std::size_t base = static_cast<std::size_t>(p) * v;
      for (std::size_t t = 0; t < v; ++t) {
        const double dl = dlogits[t];
        if (dl == 0.0) continue;
        const double* wrow = W_.w.data() + (base + t) * d;
        double* gw = W_.g.data() + (base + t) * d;
        b_.g[base + t] += dl;
        for (std::size_t i = 0; i < d; ++i) {
          gw[i] += dl * h[i];
          dh[i] += dl * wrow[i];
        }
      }
    }
    return total;
  }

  std::optional<double> predict(std::span<const double> h) const override {
    std::vector<double> logits(vocab_.size());
    NumberToken out;
    out.scheme = scheme_;
    for (int p = 0; p < scheme_.pad_len; ++p) {
      position_logits(h, p, logits);
      std::size_t best = 0;
      for (std::size_t t = 1; t < logits.size(); ++t) {
        if (logits[t] > logits[best]) best = t;
      }
      out.tokens.push_back(vocab_[best]);
    }
    const auto parsed = parse_tokens(out);
    if (!parsed) return std::nullopt;
    return parsed->value;
  }

  std::vector<Param*> params() override { return {&W_, &b_}; }

  std::string extra_state() const override {
    json j;
    j["scheme_kind"] = to_string(scheme_.kind);
    j["pad_len"] = scheme_.pad_len;
    j["pad_token"] = scheme_.pad_token;
    j["exp_separator"] = scheme_.exp_separator;
    return j.dump();
  }

  const NotationScheme& scheme() const { return scheme_; }

 private:
  bool target_ids(double answer, std::vector<int>& ids) const {
    NumberToken rendered;
    try {
      rendered = render_number(scheme_, decompose(answer));
    } catch (const std::overflow_error&) {
      return false;
    }
    ids.clear();
    ids.reserve(rendered.tokens.size());
    for (const auto& tok : rendered.tokens) ids.push_back(index_.at(tok));
    return true;
  }

  void position_logits(std::span<const double> h, int p, std::vector<double>& logits) const {
    const std::size_t v = vocab_.size();
    const std::size_t d = static_cast<std::size_t>(dim_);
    const std::size_t base = static_cast<std::size_t>(p) * v;
    for (std::size_t t = 0; t < v; ++t) {
      const double* wrow = W_.w.data() + (base + t) * d;
      double acc = b_.w[base + t];
      for (std::size_t i = 0; i < d; ++i) acc += wrow[i] * h[i];
      logits[t] = acc;
    }
  }

  HeadKind kind_;
  NotationScheme scheme_;
  int dim_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  Param W_, b_;
};

// --- decade-token heads: 17-way classifier over the answer exponent ---
class VocabHead final : public DecoderHead {
 public:
  VocabHead(HeadKind kind, int dim, Rng& rng) : kind_(kind), dim_(dim) {
    rule_ = kind == HeadKind::VocabGM ? RepRule::GeometricMean : RepRule::ArithmeticMean;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    W_.name = "head.vocab_w";
    W_.w.resize(static_cast<std::size_t>(kNumDecades) * static_cast<std::size_t>(dim_));
    W_.init_uniform(rng, scale);
    b_.name = "head.vocab_b";
    b_.w.assign(kNumDecades, 0.0);
    b_.zero_grad();
  }

  HeadKind kind() const override { return kind_; }

  double loss(std::span<const double> h, double answer) const override {
    std::vector<double> logits(kNumDecades);
    fill_logits(h, logits);
    return softmax_ce(logits, decompose(answer).exponent, nullptr);
  }

  double loss_and_grad(std::span<const double> h, double answer,
                       std::span<double> dh) override {
    const std::size_t d = static_cast<std::size_t>(dim_);
    std::vector<double> logits(kNumDecades), dlogits(kNumDecades);
    fill_logits(h, logits);
    const double l = softmax_ce(logits, decompose(answer).exponent, dlogits.data());
    for (std::size_t k = 0; k < kNumDecades; ++k) {
      const double dl = dlogits[k];
      const double* wrow = W_.w.data() + k * d;
      double* gw = W_.g.data() + k * d;
      b_.g[k] += dl;
      for (std::size_t i = 0; i < d; ++i) {
        gw[i] += dl * h[i];
        dh[i] += dl * wrow[i];
      }
    }
    return l;
  }

  std::optional<double> predict(std::span<const double> h) const override {
    std::vector<double> logits(kNumDecades);
    fill_logits(h, logits);
    int best = 0;
    for (int k = 1; k < kNumDecades; ++k) {
      if (logits[static_cast<std::size_t>(k)] > logits[static_cast<std::size_t>(best)]) best = k;
    }
    // bin 16's formula value (5e16 / 10^16.5) leaves the range; clamp
    return clamp_range(representative(best, DecadeBins{rule_}));
  }

  std::vector<Param*> params() override { return {&W_, &b_}; }

 private:
  void fill_logits(std::span<const double> h, std::vector<double>& logits) const {
    const std::size_t d = static_cast<std::size_t>(dim_);
    for (std::size_t k = 0; k < kNumDecades; ++k) {
      const double* wrow = W_.w.data() + k * d;
      double acc = b_.w[k];
      for (std::size_t i = 0; i < d; ++i) acc += wrow[i] * h[i];
      logits[k] = acc;
    }
  }

  HeadKind kind_;
  int dim_;
  RepRule rule_ = RepRule::ArithmeticMean;
  Param W_, b_;
};

// --- DExp head: context-conditioned exponent logits and mu offsets over the
// mixture decoder ---
class DExpHead final : public DecoderHead {
 public:
  DExpHead(int dim, Rng& rng) : dim_(dim) {
    const std::size_t d = static_cast<std::size_t>(dim_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    We_.name = "head.dexp_logit_w";
    We_.w.resize(static_cast<std::size_t>(kNumDecades) * d);
    We_.init_uniform(rng, scale);
    be_.name = "head.dexp_logit_b";
    be_.w.assign(kNumDecades, 0.0);
    be_.zero_grad();
    mu_base_.name = "head.dexp_mu_base";
    mu_base_.w.resize(kNumDecades);
    for (int k = 0; k < kNumDecades; ++k) {
      mu_base_.w[static_cast<std::size_t>(k)] = (k + 0.5) * std::log(10.0);
    }
    mu_base_.zero_grad();
    mu_w_.name = "head.dexp_mu_w";
    mu_w_.w.assign(static_cast<std::size_t>(kNumDecades) * d, 0.0);
    mu_w_.zero_grad();
    log_sigma_.name = "head.dexp_log_sigma";
    log_sigma_.w.assign(1, std::log(0.5));
    log_sigma_.zero_grad();
  }

  HeadKind kind() const override { return HeadKind::DExp; }

  DExpParams params_at(std::span<const double> h) const {
    const std::size_t d = static_cast<std::size_t>(dim_);
    DExpParams p;
    for (std::size_t k = 0; k < kNumDecades; ++k) {
      const double* we = We_.w.data() + k * d;
      const double* mw = mu_w_.w.data() + k * d;
      double logit = be_.w[k];
      double mu = mu_base_.w[k];
      for (std::size_t i = 0; i < d; ++i) {
        logit += we[i] * h[i];
        mu += mw[i] * h[i];
      }
      p.exponent_logits[k] = logit;
      p.mu[k] = mu;
    }
    p.log_sigma = log_sigma_.w[0];
    return p;
  }

  double loss(std::span<const double> h, double answer) const override {
    return dexp_nll(params_at(h), answer);
  }

  double loss_and_grad(std::span<const double> h, double answer,
                       std::span<double> dh) override {
    const std::size_t d = static_cast<std::size_t>(dim_);
    const DExpParams p = params_at(h);
    const DExpGrad g = dexp_grad(p, answer);
    for (std::size_t k = 0; k < kNumDecades; ++k) {
      const double dlog = g.d_logits[k];
      const double dmu = g.d_mu[k];
      be_.g[k] += dlog;
      mu_base_.g[k] += dmu;
      if (dlog == 0.0 && dmu == 0.0) continue;
      const double* we = We_.w.data() + k * d;
      const double* mw = mu_w_.w.data() + k * d;
      double* gwe = We_.g.data() + k * d;
      double* gmw = mu_w_.g.data() + k * d;
      for (std::size_t i = 0; i < d; ++i) {
        gwe[i] += dlog * h[i];
        gmw[i] += dmu * h[i];
        dh[i] += dlog * we[i] + dmu * mw[i];
      }
    }
    log_sigma_.g[0] += g.d_log_sigma;
    return dexp_nll(p, answer);
  }

  std::optional<double> predict(std::span<const double> h) const override {
    return clamp_range(dexp_predict(params_at(h)));
  }

  std::vector<Param*> params() override {
    return {&We_, &be_, &mu_base_, &mu_w_, &log_sigma_};
  }

  void post_step() override {
    log_sigma_.w[0] = std::clamp(log_sigma_.w[0], kLogSigmaMin, kLogSigmaMax);
  }

 private:
  int dim_;
  Param We_, be_, mu_base_, mu_w_, log_sigma_;
};

// --- constant baselines from the training answers ---
class ConstHead final : public DecoderHead {
 public:
  explicit ConstHead(HeadKind kind) : kind_(kind) {}

  HeadKind kind() const override { return kind_; }

  void fit(std::span<const double> train_answers) override {
    if (train_answers.empty()) {
      throw std::invalid_argument("constant head: empty training answers");
    }
    std::vector<double> sorted(train_answers.begin(), train_answers.end());
    std::sort(sorted.begin(), sorted.end());
    switch (kind_) {
      case HeadKind::ConstMean: {
        double sum = 0.0;
        for (double v : sorted) sum += v;
        value_ = sum / static_cast<double>(sorted.size());
        break;
      }
      case HeadKind::ConstMedian: {
        const std::size_t n = sorted.size();
        value_ = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        break;
      }
      case HeadKind::ConstMode: {
        double best = sorted[0], cur = sorted[0];
        std::size_t best_count = 0, cur_count = 0;
        for (double v : sorted) {
          if (v == cur) {
            ++cur_count;
          } else {
            cur = v;
            cur_count = 1;
          }
          if (cur_count > best_count) {  // ties keep the smaller value
            best_count = cur_count;
            best = cur;
          }
        }
        value_ = best;
        break;
      }
      default:
        throw std::logic_error("constant head: bad kind");
    }
    value_ = clamp_range(value_);
  }

  double loss(std::span<const double>, double) const override { return 0.0; }
  double loss_and_grad(std::span<const double>, double, std::span<double>) override {
    return 0.0;
  }
  std::optional<double> predict(std::span<const double>) const override { return value_; }

  std::string extra_state() const override {
    json j;
    j["value"] = value_;
    return j.dump();
  }
  void set_extra_state(const std::string& text) override {
    value_ = json::parse(text).at("value").get<double>();
  }

 private:
  HeadKind kind_;
  double value_ = 1.0;
};

}  // namespace

std::unique_ptr<DecoderHead> make_head(HeadKind kind, int dim, Rng& rng) {
  switch (kind) {
    case HeadKind::SubwordPad8:
      return std::make_unique<TokenHead>(kind, NotationScheme::decimal(8), dim, rng);
    case HeadKind::DigitPad17:
      return std::make_unique<TokenHead>(kind, NotationScheme::digits(17), dim, rng);
    case HeadKind::ScientificPad8:
      return std::make_unique<TokenHead>(kind, NotationScheme::scientific(8), dim, rng);
    case HeadKind::VocabAM:
    case HeadKind::VocabGM:
      return std::make_unique<VocabHead>(kind, dim, rng);
    case HeadKind::DExp:
      return std::make_unique<DExpHead>(dim, rng);
    case HeadKind::ConstMean:
    case HeadKind::ConstMedian:
    case HeadKind::ConstMode:
      return std::make_unique<ConstHead>(kind);
  }
  throw std::logic_error("make_head: bad kind");
}

std::vector<Param*> Model::all_params() {
  std::vector<Param*> out = encoder.params();
  for (Param* p : head->params()) out.push_back(p);
  return out;
}

double Model::example_loss(const MnpExample& ex) const {
  std::vector<double> h(static_cast<std::size_t>(encoder.dim()));
  encoder.encode(ex, h);
  return head->loss(h, ex.answer);
}

double Model::example_loss_and_grad(const MnpExample& ex) {
  std::vector<double> h(static_cast<std::size_t>(encoder.dim()));
  std::vector<double> dh(static_cast<std::size_t>(encoder.dim()), 0.0);
  encoder.encode(ex, h);
  const double l = head->loss_and_grad(h, ex.answer, dh);
  encoder.backward(ex, dh);
  return l;
}

std::optional<double> Model::predict(const MnpExample& ex) const {
  std::vector<double> h(static_cast<std::size_t>(encoder.dim()));
  encoder.encode(ex, h);
  return head->predict(h);
}

std::string model_to_json(const Model& m) {
  json j;
  j["head_kind"] = to_string(m.kind);
  j["encoder"]["dim"] = m.encoder.dim_;
  j["encoder"]["vocab"] = m.encoder.vocab_.words;
  j["encoder"]["word_emb"] = m.encoder.word_emb_.w;
  j["encoder"]["exp_emb"] = m.encoder.exp_emb_.w;
  json params = json::object();
  for (Param* p : const_cast<Model&>(m).head->params()) params[p->name] = p->w;
  j["head"]["params"] = params;
  j["head"]["extra"] = json::parse(m.head->extra_state());
  return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
  const json j = json::parse(text);
  Model m;
  m.kind = head_kind_from_string(j.at("head_kind").get<std::string>());

  WordVocab vocab;
  for (const auto& w : j.at("encoder").at("vocab").get<std::vector<std::string>>()) {
    vocab.add(w);
  }
  const int dim = j.at("encoder").at("dim").get<int>();
  Rng scratch(0);
  m.encoder = ContextEncoder(std::move(vocab), dim, scratch);
  m.encoder.word_emb_.w = j.at("encoder").at("word_emb").get<std::vector<double>>();
  m.encoder.exp_emb_.w = j.at("encoder").at("exp_emb").get<std::vector<double>>();
  m.encoder.word_emb_.zero_grad();
  m.encoder.exp_emb_.zero_grad();

  m.head = make_head(m.kind, dim, scratch);
  const auto& params = j.at("head").at("params");
  for (Param* p : m.head->params()) {
    p->w = params.at(p->name).get<std::vector<double>>();
    p->zero_grad();
  }
  m.head->set_extra_state(j.at("head").at("extra").dump());
  return m;
}

std::vector<std::vector<double>> snapshot_params(Model& m) {
  std::vector<std::vector<double>> snap;
  for (Param* p : m.all_params()) snap.push_back(p->w);
  return snap;
}

void restore_params(Model& m, const std::vector<std::vector<double>>& snap) {
  const auto params = m.all_params();
  if (params.size() != snap.size()) throw std::logic_error("restore_params: shape mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->w = snap[i];
}

}  // namespace numline
