#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "numline/rng.hpp"

namespace numline {

/// True iff prediction and truth share a decade (equal exponents).
/// Throws std::out_of_range when either value leaves [1, 1e16].
bool e_acc(double pred, double truth);

/// Mean |log10(pred) - log10(truth)|, base 10 so one decade of error is 1.0.
/// Throws std::invalid_argument on length mismatch or empty input.
double log_mae(std::span<const double> preds, std::span<const double> truths);

/// z * sqrt(a(1-a)/n) — the normal-approximation halfwidth (z = 2.58 for a
/// 99% interval). Throws std::invalid_argument on bad inputs.
double wilson_halfwidth(double a, std::size_t n, double z);

using MetricFn = std::function<double(std::span<const double>, std::span<const double>)>;

/// Population variance of the metric over k subsamples drawn without
/// replacement, each of size ceil(frac * n). Bit-for-bit reproducible under
/// the same seed. Throws std::invalid_argument on empty/mismatched input.
double bootstrap_variance(const MetricFn& metric, std::span<const double> preds,
                          std::span<const double> truths, std::size_t k, double frac,
                          Rng& rng);

/// Shardable metric state. Counts are integers and the absolute-log-error
/// sum is fixed-point (2^-40 resolution), so merging shard accumulators in
/// any grouping reproduces the sequential result exactly.
struct MetricAccumulator {
  std::size_t n_total = 0;
  std::size_t n_valid = 0;
  std::size_t n_invalid = 0;
  std::size_t n_exponent_hits = 0;
  __int128 abs_log_err_fx = 0;

  void add(double pred, double truth);
  void add_invalid();
  void merge(const MetricAccumulator& other);

  double e_acc() const;
  double log_mae() const;
  double na_fraction() const;
};

struct EvalOptions {
  double z = 2.58;  // 99% interval
  std::size_t bootstrap_k = 10;
  double bootstrap_frac = 0.75;
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::size_t n = 0;        // examples evaluated
  std::size_t n_valid = 0;  // examples with a parseable prediction
  double e_acc = 0.0;
  double e_acc_ci_halfwidth = 0.0;
  double log_mae = 0.0;
  double na_fraction = 0.0;
  double bootstrap_var_log_mae = 0.0;
  bool na_status = false;  // set when na_fraction >= 0.5
};

/// Aggregates predictions against truths. Invalid (nullopt) predictions are
/// excluded from E-Acc/LogMAE and counted into na_fraction; a report with
/// >= 50% invalid predictions carries NA status.
EvalReport evaluate(std::span<const std::optional<double>> preds,
                    std::span<const double> truths, const EvalOptions& opts = {});

}  // namespace numline
