#pragma once

#include <string>
#include <vector>

#include "numline/corpus.hpp"
#include "numline/metrics.hpp"
#include "numline/model.hpp"

namespace numline {

/// Mini-batch gradient descent with two learning-rate groups and early
/// stopping on dev loss (patience epochs without improvement); returns the
/// best-dev checkpoint. Constant heads just fit their statistic.
/// Throws std::runtime_error("non-finite loss ...") with diagnostics when a
/// batch or dev loss leaves the reals.
Model train_model(HeadKind kind, const TrainConfig& config, const Corpus& corpus,
                  int encoder_dim = 64);

/// Mean loss over a split (token heads skip answers they cannot render).
double dataset_loss(const Model& model, const std::vector<MnpExample>& examples);

/// Predictions + truths evaluated through the metrics module.
EvalReport evaluate_model(const Model& model, const std::vector<MnpExample>& examples,
                          const EvalOptions& opts = {});

struct ExperimentConfig {
  std::uint64_t seed = 20230417;
  int encoder_dim = 64;
  CorpusConfig corpus;
  TrainConfig train;
  std::vector<HeadKind> heads;

  static ExperimentConfig defaults();
};

/// JSON round trip for configs; unknown keys are rejected, missing keys keep
/// defaults.
ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct HeadResult {
  HeadKind kind = HeadKind::VocabAM;
  EvalReport report;
  bool within_ci_of_best = false;  // |e_acc - best| <= combined halfwidths
};

struct ExperimentReport {
  ExperimentConfig config;
  int corpus_decades = 0;
  std::vector<HeadResult> results;

  const HeadResult* find(HeadKind kind) const;
};

/// Trains every configured head on the same corpus and seed, evaluates on
/// the test split, and flags heads whose E-Acc sits within the z=2.58
/// interval of the best head.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string experiment_report_to_json(const ExperimentReport& report);

/// One row per head: the comparison table as TSV.
std::string experiment_table_tsv(const ExperimentReport& report);

}  // namespace numline
