#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "numline/analysis.hpp"
#include "numline/train.hpp"

using namespace numline;

namespace {

CorpusConfig tiny_config(std::size_t n_train = 600, std::size_t n_dev = 150,
                         std::size_t n_test = 150) {
  CorpusConfig cfg = CorpusConfig::defaults();
  cfg.n_train = n_train;
  cfg.n_dev = n_dev;
  cfg.n_test = n_test;
  return cfg;
}

bool same_examples(const std::vector<MnpExample>& a, const std::vector<MnpExample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].tokens != b[i].tokens || a[i].answer != b[i].answer) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("corpus generation is deterministic under the seed") {
  const CorpusConfig cfg = tiny_config();
  const Corpus a = gen_corpus(cfg, 7);
  const Corpus b = gen_corpus(cfg, 7);
  CHECK(same_examples(a.train, b.train));
  CHECK(same_examples(a.dev, b.dev));
  CHECK(same_examples(a.test, b.test));

  const Corpus c = gen_corpus(cfg, 8);
  CHECK(!same_examples(a.train, c.train));
}

TEST_CASE("corpus spans enough decades and keeps answers in range") {
  const Corpus corpus = gen_corpus(tiny_config(3000, 300, 300), 11);
  CHECK(count_decades(corpus.train) >= 6);
  for (const auto& ex : corpus.train) {
    CHECK(ex.answer >= 1.0);
    CHECK(ex.answer <= 1e16);
    CHECK(std::count(ex.tokens.begin(), ex.tokens.end(), std::string(kMaskToken)) == 1);
  }
}

TEST_CASE("year template clusters near 2000-2020 with mantissa around 2") {
  CorpusConfig cfg = tiny_config(4000, 200, 200);
  for (auto& t : cfg.templates) t.weight = t.year_like ? 1.0 : 0.0;
  const Corpus corpus = gen_corpus(cfg, 3);
  std::vector<double> answers;
  for (const auto& ex : corpus.train) {
    CHECK(ex.answer >= 1990.0);
    CHECK(ex.answer <= 2030.0);
    answers.push_back(ex.answer);
  }
  const MantissaHistogram h = mantissa_histogram(answers, 18);
  const int mode = h.mode_bin();
  CHECK(h.edges[static_cast<std::size_t>(mode)] <= 2.0);
  CHECK(h.edges[static_cast<std::size_t>(mode) + 1] > 2.0);
}

TEST_CASE("tiger template concentrates in decade 2") {
  CorpusConfig cfg = tiny_config(1000, 100, 100);
  for (std::size_t i = 0; i < cfg.templates.size(); ++i) {
    cfg.templates[i].weight = cfg.templates[i].tokens[0] == "tigers" ? 1.0 : 0.0;
  }
  const Corpus corpus = gen_corpus(cfg, 5);
  std::size_t in_decade = 0;
  for (const auto& ex : corpus.train) {
    if (decompose(ex.answer).exponent == 2) ++in_decade;
  }
  CHECK(static_cast<double>(in_decade) / static_cast<double>(corpus.train.size()) > 0.9);
}

TEST_CASE("context numbers are extracted into the example") {
  const auto ex = make_example("the firm paid [MASK] dollars out of its 3000000 budget", 25000.0);
  REQUIRE(ex.context_numbers.size() == 1);
  CHECK(ex.context_numbers[0].value == 3000000.0);
  CHECK(ex.context_numbers[0].exponent == 6);
}

TEST_CASE("jsonl round trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "numline_corpus_io";
  fs::create_directories(dir);
  const Corpus corpus = gen_corpus(tiny_config(50, 10, 10), 21);
  const std::string path = (dir / "train.jsonl").string();
  save_jsonl(corpus.train, path);
  const auto back = load_jsonl(path);
  CHECK(same_examples(corpus.train, back));
  fs::remove_all(dir);
}

TEST_CASE("examples reject malformed masks and answers") {
  CHECK_THROWS_AS(make_example("no mask here", 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_example("[MASK] and [MASK]", 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_example("a [MASK] b", 0.5), std::invalid_argument);
}

TEST_CASE("constant heads fit their statistics") {
  Rng rng(1);
  const std::vector<double> answers = {1.0, 2.0, 2.0, 9.0};

  auto median = make_head(HeadKind::ConstMedian, 4, rng);
  median->fit(answers);
  std::vector<double> h(4, 0.0);
  CHECK(*median->predict(h) == 2.0);

  auto mean = make_head(HeadKind::ConstMean, 4, rng);
  mean->fit(answers);
  CHECK(*mean->predict(h) == 3.5);

  auto mode = make_head(HeadKind::ConstMode, 4, rng);
  mode->fit(answers);
  CHECK(*mode->predict(h) == 2.0);

  // mode ties break toward the smaller value
  auto mode2 = make_head(HeadKind::ConstMode, 4, rng);
  mode2->fit(std::vector<double>{7.0, 7.0, 3.0, 3.0, 50.0});
  CHECK(*mode2->predict(h) == 3.0);
}

TEST_CASE("vocab head learns a single-decade corpus perfectly") {
  CorpusConfig cfg = tiny_config(400, 100, 100);
  for (std::size_t i = 0; i < cfg.templates.size(); ++i) {
    cfg.templates[i].weight = cfg.templates[i].tokens[0] == "tigers" ? 1.0 : 0.0;
  }
  // tighten the spread so the decade is pure
  for (auto& t : cfg.templates) t.log10_sd = 0.05;
  Corpus corpus = gen_corpus(cfg, 17);

  TrainConfig tc;
  tc.seed = 17;
  tc.max_epochs = 5;
  tc.patience = 3;
  const Model model = train_model(HeadKind::VocabAM, tc, corpus, 32);
  const EvalReport dev = evaluate_model(model, corpus.dev);
  CHECK(dev.e_acc == 1.0);
  CHECK(dev.na_fraction == 0.0);
}

TEST_CASE("vocab training labels equal the answer exponent") {
  const Corpus corpus = gen_corpus(tiny_config(200, 50, 50), 23);
  for (const auto& ex : corpus.train) {
    CHECK(decompose(ex.answer).exponent >= 0);
    CHECK(decompose(ex.answer).exponent <= 16);
  }
}

TEST_CASE("training is bit-deterministic under the seed") {
  const Corpus corpus = gen_corpus(tiny_config(300, 60, 60), 29);
  TrainConfig tc;
  tc.seed = 4;
  tc.max_epochs = 3;
  tc.patience = 2;
  Model a = train_model(HeadKind::VocabGM, tc, corpus, 16);
  Model b = train_model(HeadKind::VocabGM, tc, corpus, 16);
  const auto pa = snapshot_params(a);
  const auto pb = snapshot_params(b);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
  CHECK(model_to_json(a) == model_to_json(b));
}

TEST_CASE("model json checkpoint round trips") {
  const Corpus corpus = gen_corpus(tiny_config(200, 40, 40), 31);
  TrainConfig tc;
  tc.seed = 9;
  tc.max_epochs = 2;
  tc.patience = 1;
  for (HeadKind kind : {HeadKind::VocabAM, HeadKind::DExp, HeadKind::SubwordPad8,
                        HeadKind::ConstMedian}) {
    Model m = train_model(kind, tc, corpus, 16);
    Model back = model_from_json(model_to_json(m));
    for (const auto& ex : corpus.test) {
      CHECK(m.predict(ex) == back.predict(ex));
    }
  }
}

TEST_CASE("every gradient head matches finite differences") {
  const Corpus corpus = gen_corpus(tiny_config(64, 16, 16), 37);
  Rng pick(4096);
  const double fd_h = 1e-5;

  for (HeadKind kind : {HeadKind::SubwordPad8, HeadKind::DigitPad17,
                        HeadKind::ScientificPad8, HeadKind::VocabAM, HeadKind::VocabGM,
                        HeadKind::DExp}) {
    CAPTURE(to_string(kind));
    Rng init(derive_seed(101, static_cast<std::uint64_t>(kind)));
    Model model;
    model.kind = kind;
    model.encoder = ContextEncoder(WordVocab::build(corpus), 12, init);
    model.head = make_head(kind, 12, init);

    // 20 random small batches per head
    for (int batch = 0; batch < 20; ++batch) {
      std::vector<const MnpExample*> examples;
      for (int i = 0; i < 4; ++i) {
        const MnpExample* ex =
            &corpus.train[static_cast<std::size_t>(pick.below(corpus.train.size()))];
        if (model.head->has_target(ex->answer)) examples.push_back(ex);
      }
      if (examples.empty()) continue;

      for (Param* p : model.all_params()) p->zero_grad();
      double loss = 0.0;
      for (const auto* ex : examples) loss += model.example_loss_and_grad(*ex);
      CHECK(std::isfinite(loss));

      auto batch_loss = [&]() {
        double l = 0.0;
        for (const auto* ex : examples) l += model.example_loss(*ex);
        return l;
      };

      // spot-check a handful of coordinates in every tensor
      for (Param* p : model.all_params()) {
        if (p->w.empty()) continue;
        for (int probe = 0; probe < 3; ++probe) {
          const std::size_t i = static_cast<std::size_t>(pick.below(p->w.size()));
          const double keep = p->w[i];
          p->w[i] = keep + fd_h;
          const double up = batch_loss();
          p->w[i] = keep - fd_h;
          const double down = batch_loss();
          p->w[i] = keep;
          const double fd = (up - down) / (2.0 * fd_h);
          const double analytic = p->g[i];
          const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
          CHECK(std::abs(fd - analytic) / denom <= 1e-4);
        }
      }
    }
  }
}

TEST_CASE("token heads can emit invalid sequences that count toward NA") {
  const Corpus corpus = gen_corpus(tiny_config(60, 20, 20), 41);
  Rng init(2);
  Model model;
  model.kind = HeadKind::ScientificPad8;
  model.encoder = ContextEncoder(WordVocab::build(corpus), 8, init);
  model.head = make_head(HeadKind::ScientificPad8, 8, init);

  // bias the separator token so greedy decoding emits it first: "e..." has
  // an empty mantissa and must parse as Invalid
  for (Param* p : model.head->params()) {
    if (p->name == "head.token_b") {
      const auto vocab = scheme_vocabulary(NotationScheme::scientific());
      for (std::size_t t = 0; t < vocab.size(); ++t) {
        p->w[t] = vocab[t] == "e" ? 100.0 : 0.0;
      }
    }
  }
  const auto pred = model.predict(corpus.test[0]);
  CHECK(!pred.has_value());
  const EvalReport r = evaluate_model(model, corpus.test);
  CHECK(r.na_fraction == 1.0);
  CHECK(r.na_status);
}

TEST_CASE("head predictions stay inside the metric range") {
  const Corpus corpus = gen_corpus(tiny_config(200, 40, 40), 43);
  TrainConfig tc;
  tc.seed = 3;
  tc.max_epochs = 2;
  tc.patience = 1;
  for (HeadKind kind : {HeadKind::VocabAM, HeadKind::VocabGM, HeadKind::DExp}) {
    const Model model = train_model(kind, tc, corpus, 16);
    for (const auto& ex : corpus.test) {
      const auto pred = model.predict(ex);
      REQUIRE(pred.has_value());
      CHECK(*pred >= 1.0);
      CHECK(*pred <= 1e16);
    }
  }
}

TEST_CASE("dexp learns decade routing") {
  const Corpus corpus = gen_corpus(tiny_config(2500, 250, 250), 47);
  TrainConfig tc;
  tc.seed = 8;
  const Model model = train_model(HeadKind::DExp, tc, corpus, 32);
  std::size_t hits = 0;
  for (const auto& ex : corpus.test) {
    const double pred = *model.predict(ex);
    if (decompose(pred).exponent == decompose(ex.answer).exponent) ++hits;
  }
  // trained routing must beat chance by a wide margin
  CHECK(static_cast<double>(hits) / static_cast<double>(corpus.test.size()) > 0.5);
}

TEST_CASE("experiment report is reproducible and structured") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.seed = 5;
  cfg.encoder_dim = 16;
  cfg.corpus.n_train = 400;
  cfg.corpus.n_dev = 80;
  cfg.corpus.n_test = 80;
  cfg.train.max_epochs = 2;
  cfg.train.patience = 1;
  cfg.heads = {HeadKind::ConstMedian, HeadKind::VocabAM};

  const ExperimentReport a = run_experiment(cfg);
  const ExperimentReport b = run_experiment(cfg);
  CHECK(experiment_report_to_json(a) == experiment_report_to_json(b));
  CHECK(experiment_table_tsv(a) == experiment_table_tsv(b));
  REQUIRE(a.results.size() == 2);
  CHECK(a.find(HeadKind::VocabAM) != nullptr);
  // the best head is always within its own interval
  const HeadResult* best = a.find(HeadKind::VocabAM)->report.e_acc >=
                                   a.find(HeadKind::ConstMedian)->report.e_acc
                               ? a.find(HeadKind::VocabAM)
                               : a.find(HeadKind::ConstMedian);
  CHECK(best->within_ci_of_best);
}

TEST_CASE("config json round trip and validation") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.seed = 99;
  cfg.corpus.n_train = 123;
  cfg.heads = {HeadKind::DExp};
  const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(cfg));
  CHECK(back.seed == 99);
  CHECK(back.corpus.n_train == 123);
  REQUIRE(back.heads.size() == 1);
  CHECK(back.heads[0] == HeadKind::DExp);

  CHECK_THROWS_AS(experiment_config_from_json("{\"bogus\": 1}"), std::invalid_argument);
  CHECK_THROWS_AS(head_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("the returned checkpoint is the best-dev one") {
  const Corpus corpus = gen_corpus(tiny_config(400, 100, 100), 53);
  TrainConfig tc;
  tc.seed = 13;

  // an untrained clone bounds the selected checkpoint from above
  Rng init(derive_seed(tc.seed, 0x1217));
  Model fresh;
  fresh.kind = HeadKind::VocabAM;
  fresh.encoder = ContextEncoder(WordVocab::build(corpus), 16, init);
  fresh.head = make_head(HeadKind::VocabAM, 16, init);
  const double init_dev = dataset_loss(fresh, corpus.dev);

  const Model trained = train_model(HeadKind::VocabAM, tc, corpus, 16);
  CHECK(dataset_loss(trained, corpus.dev) <= init_dev);
}

TEST_CASE("a diverging run aborts with a non-finite-loss diagnostic") {
  const Corpus corpus = gen_corpus(tiny_config(200, 50, 50), 59);
  TrainConfig tc;
  tc.seed = 2;
  tc.lr_new = 1e8;  // guaranteed blow-up
  try {
    train_model(HeadKind::DExp, tc, corpus, 16);
    FAIL("expected a non-finite loss abort");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("non-finite loss") != std::string::npos);
    CHECK(std::string(e.what()).find("dexp") != std::string::npos);
  }
}

TEST_CASE("train config validation") {
  TrainConfig tc;
  tc.patience = 10;
  tc.max_epochs = 10;
  CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
  tc.patience = 3;
  tc.batch_size = 0;
  CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
}
