#include "numline/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "numline/io.hpp"

namespace numline {

using nlohmann::json;

namespace {

std::vector<double> train_answers(const Corpus& corpus) {
  std::vector<double> answers;
  answers.reserve(corpus.train.size());
  for (const auto& ex : corpus.train) answers.push_back(ex.answer);
  return answers;
}

void sgd_step(Model& model, const TrainConfig& cfg, double inv_batch) {
  for (Param* p : model.all_params()) {
    const double lr = (p->pretrained_group ? cfg.lr_pretrained : cfg.lr_new) * inv_batch;
    for (std::size_t i = 0; i < p->w.size(); ++i) p->w[i] -= lr * p->g[i];
  }
  model.head->post_step();
}

}  // namespace

double dataset_loss(const Model& model, const std::vector<MnpExample>& examples) {
  double total = 0.0;
  std::size_t used = 0;
  for (const auto& ex : examples) {
    if (!model.head->has_target(ex.answer)) continue;
    total += model.example_loss(ex);
    ++used;
  }
  return used == 0 ? 0.0 : total / static_cast<double>(used);
}

Model train_model(HeadKind kind, const TrainConfig& config, const Corpus& corpus,
                  int encoder_dim) {
  config.validate();
  if (corpus.train.empty() || corpus.dev.empty()) {
    throw std::invalid_argument("train_model: train and dev splits must be nonempty");
  }

  Rng init_rng(derive_seed(config.seed, 0x1217));
  Model model;
  model.kind = kind;
  model.encoder = ContextEncoder(WordVocab::build(corpus), encoder_dim, init_rng);
  model.head = make_head(kind, encoder_dim, init_rng);

  if (is_constant_head(kind)) {
    model.head->fit(train_answers(corpus));
    return model;
  }

  Rng order_rng(derive_seed(config.seed, 0x0B47C4));
  std::vector<std::size_t> order(corpus.train.size());
  std::iota(order.begin(), order.end(), 0);

  double best_dev = dataset_loss(model, corpus.dev);
  auto best = snapshot_params(model);
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    const std::size_t n = order.size();
    for (std::size_t batch_start = 0; batch_start < n;
         batch_start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t batch_end =
          std::min(n, batch_start + static_cast<std::size_t>(config.batch_size));
      for (Param* p : model.all_params()) p->zero_grad();
      double loss = 0.0;
      std::size_t used = 0;
      for (std::size_t i = batch_start; i < batch_end; ++i) {
        const MnpExample& ex = corpus.train[order[i]];
        if (!model.head->has_target(ex.answer)) continue;
        loss += model.example_loss_and_grad(ex);
        ++used;
      }
      if (used == 0) continue;
      loss /= static_cast<double>(used);
      if (!std::isfinite(loss)) {
        throw std::runtime_error(
            "non-finite loss: head=" + std::string(to_string(kind)) +
            " epoch=" + std::to_string(epoch) +
            " batch_start=" + std::to_string(batch_start) +
            " loss=" + format_double(loss));
      }
      sgd_step(model, config, 1.0 / static_cast<double>(used));
    }

    const double dev = dataset_loss(model, corpus.dev);
    if (!std::isfinite(dev)) {
      throw std::runtime_error("non-finite loss: head=" + std::string(to_string(kind)) +
                               " dev loss after epoch " + std::to_string(epoch));
    }
    if (dev < best_dev) {
      best_dev = dev;
      best = snapshot_params(model);
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= config.patience) break;
    }
  }

  restore_params(model, best);
  return model;
}

EvalReport evaluate_model(const Model& model, const std::vector<MnpExample>& examples,
                          const EvalOptions& opts) {
  std::vector<std::optional<double>> preds;
  std::vector<double> truths;
  preds.reserve(examples.size());
  truths.reserve(examples.size());
  for (const auto& ex : examples) {
    preds.push_back(model.predict(ex));
    truths.push_back(ex.answer);
  }
  return evaluate(preds, truths, opts);
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.corpus = CorpusConfig::defaults();
  cfg.heads = all_head_kinds();
  return cfg;
}

namespace {

void apply_train_json(TrainConfig& t, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "batch_size") t.batch_size = value.get<int>();
    else if (key == "max_epochs") t.max_epochs = value.get<int>();
    else if (key == "patience") t.patience = value.get<int>();
    else if (key == "lr_pretrained") t.lr_pretrained = value.get<double>();
    else if (key == "lr_new") t.lr_new = value.get<double>();
    else throw std::invalid_argument("config: unknown train key '" + key + "'");
  }
}

void apply_corpus_json(CorpusConfig& c, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "n_train") c.n_train = value.get<std::size_t>();
    else if (key == "n_dev") c.n_dev = value.get<std::size_t>();
    else if (key == "n_test") c.n_test = value.get<std::size_t>();
    else if (key == "template_weights") {
      const auto weights = value.get<std::vector<double>>();
      if (weights.size() != c.templates.size()) {
        throw std::invalid_argument("config: template_weights length must match templates");
      }
      for (std::size_t i = 0; i < weights.size(); ++i) c.templates[i].weight = weights[i];
    } else {
      throw std::invalid_argument("config: unknown corpus key '" + key + "'");
    }
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  const json j = json::parse(text);
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "encoder_dim") {
      cfg.encoder_dim = value.get<int>();
    } else if (key == "corpus") {
      apply_corpus_json(cfg.corpus, value);
    } else if (key == "train") {
      apply_train_json(cfg.train, value);
    } else if (key == "heads") {
      cfg.heads.clear();
      for (const auto& name : value.get<std::vector<std::string>>()) {
        cfg.heads.push_back(head_kind_from_string(name));
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["encoder_dim"] = config.encoder_dim;
  j["corpus"]["n_train"] = config.corpus.n_train;
  j["corpus"]["n_dev"] = config.corpus.n_dev;
  j["corpus"]["n_test"] = config.corpus.n_test;
  std::vector<double> weights;
  for (const auto& t : config.corpus.templates) weights.push_back(t.weight);
  j["corpus"]["template_weights"] = weights;
  j["train"]["batch_size"] = config.train.batch_size;
  j["train"]["max_epochs"] = config.train.max_epochs;
  j["train"]["patience"] = config.train.patience;
  j["train"]["lr_pretrained"] = config.train.lr_pretrained;
  j["train"]["lr_new"] = config.train.lr_new;
  std::vector<std::string> heads;
  for (HeadKind k : config.heads) heads.emplace_back(to_string(k));
  j["heads"] = heads;
  return j.dump(2) + "\n";
}

const HeadResult* ExperimentReport::find(HeadKind kind) const {
  for (const auto& r : results) {
    if (r.kind == kind) return &r;
  }
  return nullptr;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.heads.empty()) {
    throw std::invalid_argument("experiment: no heads configured");
  }
  ExperimentReport report;
  report.config = config;

  const Corpus corpus = gen_corpus(config.corpus, config.seed);
  report.corpus_decades = count_decades(corpus.train);

  TrainConfig train_cfg = config.train;
  train_cfg.seed = config.seed;
  EvalOptions eval_opts;
  eval_opts.seed = derive_seed(config.seed, 0xE7A1);

  for (HeadKind kind : config.heads) {
    const Model model = train_model(kind, train_cfg, corpus, config.encoder_dim);
    HeadResult r;
    r.kind = kind;
    r.report = evaluate_model(model, corpus.test, eval_opts);
    report.results.push_back(std::move(r));
  }

  // flag heads whose E-Acc is within the 99% interval of the best
  // (NA-status heads never set the bar)
  const HeadResult* best = nullptr;
  for (const auto& r : report.results) {
    if (r.report.na_status) continue;
    if (best == nullptr || r.report.e_acc > best->report.e_acc) best = &r;
  }
  if (best != nullptr) {
    for (auto& r : report.results) {
      const double combined = r.report.e_acc_ci_halfwidth + best->report.e_acc_ci_halfwidth;
      r.within_ci_of_best =
          !r.report.na_status && std::abs(r.report.e_acc - best->report.e_acc) <= combined;
    }
  }
  return report;
}

namespace {

json report_json(const EvalReport& r) {
  json j;
  j["n"] = r.n;
  j["n_valid"] = r.n_valid;
  j["e_acc"] = r.e_acc;
  j["e_acc_ci_halfwidth"] = r.e_acc_ci_halfwidth;
  j["log_mae"] = r.log_mae;
  j["na_fraction"] = r.na_fraction;
  j["bootstrap_var_log_mae"] = r.bootstrap_var_log_mae;
  j["status"] = r.na_status ? "na" : "ok";
  return j;
}

}  // namespace

std::string experiment_report_to_json(const ExperimentReport& report) {
  json j;
  j["config"] = json::parse(experiment_config_to_json(report.config));
  j["corpus_decades"] = report.corpus_decades;
  j["results"] = json::array();
  for (const auto& r : report.results) {
    json row;
    row["head"] = to_string(r.kind);
    row["report"] = report_json(r.report);
    row["within_99ci_of_best"] = r.within_ci_of_best;
    j["results"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string experiment_table_tsv(const ExperimentReport& report) {
  std::string out =
      "head\te_acc\te_acc_ci_halfwidth\tlog_mae\tna_fraction\tbootstrap_var_log_mae\tn\t"
      "n_valid\tstatus\twithin_99ci_of_best\n";
  for (const auto& r : report.results) {
    out += std::string(to_string(r.kind)) + "\t" + format_double(r.report.e_acc) + "\t" +
           format_double(r.report.e_acc_ci_halfwidth) + "\t" +
           format_double(r.report.log_mae) + "\t" + format_double(r.report.na_fraction) +
           "\t" + format_double(r.report.bootstrap_var_log_mae) + "\t" +
           std::to_string(r.report.n) + "\t" + std::to_string(r.report.n_valid) + "\t" +
           (r.report.na_status ? "na" : "ok") + "\t" + (r.within_ci_of_best ? "1" : "0") +
           "\n";
  }
  return out;
}

}  // namespace numline
