#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "numline/corpus.hpp"
#include "numline/notation.hpp"
#include "numline/rng.hpp"

namespace numline {

enum class HeadKind {
  SubwordPad8,
  DigitPad17,
  ScientificPad8,
  VocabAM,
  VocabGM,
  DExp,
  ConstMean,
  ConstMedian,
  ConstMode,
};

const char* to_string(HeadKind k);
HeadKind head_kind_from_string(const std::string& name);
bool is_constant_head(HeadKind k);
const std::vector<HeadKind>& all_head_kinds();

struct TrainConfig {
  int batch_size = 32;
  int max_epochs = 10;
  int patience = 3;          // early stopping on dev loss
  double lr_pretrained = 3e-5;  // embedding tables
  double lr_new = 1e-2;         // newly added head parameters
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

/// Flat named parameter tensor with its gradient buffer. pretrained_group
/// selects the smaller learning rate (the embedding tables play the role of
/// the pretrained weights; head parameters are the newly added ones).
struct Param {
  std::string name;
  bool pretrained_group = false;
  std::vector<double> w;
  std::vector<double> g;

  void init_uniform(Rng& rng, double scale);
  void zero_grad();
};

struct WordVocab {
  std::vector<std::string> words;  // [UNK] first
  std::unordered_map<std::string, int> index;

  int add(const std::string& word);
  int lookup(const std::string& word) const;  // unknown words map to [UNK]
  static WordVocab build(const Corpus& corpus);
};

/// Mean-pooled embedding bag. Word tokens read the word table; numeric
/// tokens read one of 17 exponent embeddings keyed by their decade.
class ContextEncoder {
 public:
  ContextEncoder() = default;
  ContextEncoder(WordVocab vocab, int dim, Rng& rng);

  int dim() const { return dim_; }
  const WordVocab& vocab() const { return vocab_; }

  void encode(const MnpExample& ex, std::span<double> h) const;
  void backward(const MnpExample& ex, std::span<const double> dh);
  std::vector<Param*> params();

  WordVocab vocab_;
  int dim_ = 0;
  Param word_emb_;  // |V| x D
  Param exp_emb_;   // 17 x D
};

class DecoderHead {
 public:
  virtual ~DecoderHead() = default;
  virtual HeadKind kind() const = 0;

  /// Loss without touching gradients (dev evaluation, finite differences).
  virtual double loss(std::span<const double> h, double answer) const = 0;

  /// Loss; accumulates parameter gradients internally and the context
  /// gradient into dh.
  virtual double loss_and_grad(std::span<const double> h, double answer,
                               std::span<double> dh) = 0;

  virtual std::optional<double> predict(std::span<const double> h) const = 0;

  /// False when the answer has no training target under this head (token
  /// heads cannot render values past their pad budget; such examples are
  /// skipped in the loss).
  virtual bool has_target(double answer) const;

  virtual std::vector<Param*> params() { return {}; }

  /// Constant baselines fit here; gradient heads ignore it.
  virtual void fit(std::span<const double> train_answers);

  /// Invoked after each optimizer step (DExp clamps its scale here).
  virtual void post_step() {}

  /// Head state beyond params(), as a JSON object string.
  virtual std::string extra_state() const { return "{}"; }
  virtual void set_extra_state(const std::string& json_text);
};

std::unique_ptr<DecoderHead> make_head(HeadKind kind, int dim, Rng& rng);

struct Model {
  HeadKind kind = HeadKind::VocabAM;
  ContextEncoder encoder;
  std::unique_ptr<DecoderHead> head;

  std::vector<Param*> all_params();
  double example_loss(const MnpExample& ex) const;
  double example_loss_and_grad(const MnpExample& ex);  // accumulates grads
  std::optional<double> predict(const MnpExample& ex) const;
};

/// Full-precision JSON checkpoint round trip.
std::string model_to_json(const Model& m);
Model model_from_json(const std::string& text);

std::vector<std::vector<double>> snapshot_params(Model& m);
void restore_params(Model& m, const std::vector<std::vector<double>>& snap);

}  // namespace numline
