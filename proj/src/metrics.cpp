#include "numline/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "numline/numparse.hpp"

namespace numline {

namespace {

constexpr double kFxScale = 1099511627776.0;  // 2^40

__int128 to_fixed(double term) {
  return static_cast<__int128>(std::llround(term * kFxScale));
}

double from_fixed(__int128 fx) { return static_cast<double>(fx) / kFxScale; }

}  // namespace

bool e_acc(double pred, double truth) {
  return decompose(pred).exponent == decompose(truth).exponent;
}

double log_mae(std::span<const double> preds, std::span<const double> truths) {
  if (preds.size() != truths.size()) {
    throw std::invalid_argument("log_mae: length mismatch between preds and truths");
  }
  if (preds.empty()) throw std::invalid_argument("log_mae: empty input");
  MetricAccumulator acc;
  for (std::size_t i = 0; i < preds.size(); ++i) acc.add(preds[i], truths[i]);
  return acc.log_mae();
}

double wilson_halfwidth(double a, std::size_t n, double z) {
  if (!(a >= 0.0 && a <= 1.0) || n < 1 || !(z > 0.0)) {
    throw std::invalid_argument("wilson_halfwidth: need a in [0,1], n >= 1, z > 0");
  }
  return z * std::sqrt(a * (1.0 - a) / static_cast<double>(n));
}

double bootstrap_variance(const MetricFn& metric, std::span<const double> preds,
                          std::span<const double> truths, std::size_t k, double frac,
                          Rng& rng) {
  if (preds.size() != truths.size()) {
    throw std::invalid_argument("bootstrap_variance: length mismatch");
  }
  if (preds.empty() || k < 1 || !(frac > 0.0 && frac <= 1.0)) {
    throw std::invalid_argument("bootstrap_variance: empty input or bad k/frac");
  }
  const std::size_t n = preds.size();
  const std::size_t m = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n)));

  std::vector<double> samples;
  samples.reserve(k);
  std::vector<std::size_t> idx(n);
  std::vector<double> sp(m), st(m);
  for (std::size_t rep = 0; rep < k; ++rep) {
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: the first m entries form the subsample
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
      sp[i] = preds[idx[i]];
      st[i] = truths[idx[i]];
    }
    samples.push_back(metric(sp, st));
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  return var / static_cast<double>(k);
}

void MetricAccumulator::add(double pred, double truth) {
  ++n_total;
  ++n_valid;
  if (numline::e_acc(pred, truth)) ++n_exponent_hits;
  abs_log_err_fx += to_fixed(std::abs(std::log10(pred) - std::log10(truth)));
}

void MetricAccumulator::add_invalid() {
  ++n_total;
  ++n_invalid;
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  n_total += other.n_total;
  n_valid += other.n_valid;
  n_invalid += other.n_invalid;
  n_exponent_hits += other.n_exponent_hits;
  abs_log_err_fx += other.abs_log_err_fx;
}

double MetricAccumulator::e_acc() const {
  return n_valid == 0 ? 0.0
                      : static_cast<double>(n_exponent_hits) / static_cast<double>(n_valid);
}

double MetricAccumulator::log_mae() const {
  return n_valid == 0 ? 0.0 : from_fixed(abs_log_err_fx) / static_cast<double>(n_valid);
}

double MetricAccumulator::na_fraction() const {
  return n_total == 0 ? 0.0
                      : static_cast<double>(n_invalid) / static_cast<double>(n_total);
}

EvalReport evaluate(std::span<const std::optional<double>> preds,
                    std::span<const double> truths, const EvalOptions& opts) {
  if (preds.size() != truths.size()) {
    throw std::invalid_argument("evaluate: length mismatch between preds and truths");
  }
  if (preds.empty()) throw std::invalid_argument("evaluate: empty input");

  MetricAccumulator acc;
  std::vector<double> vp, vt;
  vp.reserve(preds.size());
  vt.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    decompose(truths[i]);  // truths must be in range
    if (preds[i].has_value()) {
      acc.add(*preds[i], truths[i]);
      vp.push_back(*preds[i]);
      vt.push_back(truths[i]);
    } else {
      acc.add_invalid();
    }
  }

  EvalReport r;
  r.n = acc.n_total;
  r.n_valid = acc.n_valid;
  r.e_acc = acc.e_acc();
  r.log_mae = acc.log_mae();
  r.na_fraction = acc.na_fraction();
  r.na_status = r.na_fraction >= 0.5;
  if (acc.n_valid > 0) {
    r.e_acc_ci_halfwidth = wilson_halfwidth(r.e_acc, acc.n_valid, opts.z);
    Rng rng(derive_seed(opts.seed, 0xB007));
    r.bootstrap_var_log_mae = bootstrap_variance(
        [](std::span<const double> p, std::span<const double> t) { return log_mae(p, t); },
        vp, vt, opts.bootstrap_k, opts.bootstrap_frac, rng);
  }
  return r;
}

}  // namespace numline
