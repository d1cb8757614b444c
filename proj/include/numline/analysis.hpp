#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace numline {

/// Equal-width histogram of decade mantissas over [1, 10).
struct MantissaHistogram {
  std::vector<double> edges;        // n_bins + 1 ascending edges covering [1, 10)
  std::vector<std::size_t> counts;  // sums to total
  std::size_t total = 0;

  int mode_bin() const;  // ties toward the lower bin
};

/// Throws std::invalid_argument on empty input or n_bins < 2; values must
/// lie in [1, 1e16].
MantissaHistogram mantissa_histogram(std::span<const double> values, int n_bins);

/// Leading-digit frequencies against the log10(1 + 1/d) reference, with the
/// total-variation distance (half L1).
struct BenfordReport {
  std::array<double, 10> frequency{};  // index by digit 1..9
  std::array<double, 10> reference{};
  double tv_distance = 0.0;
  std::size_t n = 0;
};

BenfordReport benford_deviation(std::span<const double> values);

/// How well one hidden unit's top-k trigger predicts a target exponent.
struct NeuronProbeResult {
  int neuron = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;  // harmonic mean; 0 when both precision and recall are 0
  int k = 0;
  int target_exponent = 0;
  std::size_t triggered = 0;  // rows where this neuron was in the top k
  std::size_t hits = 0;       // triggered rows with the target label
  std::size_t positives = 0;  // rows with the target label
};

struct ActivationMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows * cols

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// A neuron is triggered on a row when it is among the row's k largest
/// activations (ties broken toward the lower neuron index, so trigger sets
/// have exactly k members). Returns one result per neuron, ranked by F1
/// descending (ties toward the lower index). The top-k rule is rank-based,
/// so any strictly monotone row-wise transform leaves results unchanged.
/// Throws std::invalid_argument on shape mismatch or bad k.
std::vector<NeuronProbeResult> neuron_pr(const ActivationMatrix& activations,
                                         std::span<const int> labels, int target_exponent,
                                         int k);

/// (precision, recall) points for one neuron as the cutoff k sweeps 1..D.
std::vector<std::pair<double, double>> neuron_pr_curve(const ActivationMatrix& activations,
                                                       std::span<const int> labels,
                                                       int target_exponent, int neuron);

/// Matrix file format: a one-line header "N D" followed by N rows. Text rows
/// hold D comma- or whitespace-separated numbers; the binary variant holds
/// N*D little-endian doubles immediately after the header line.
ActivationMatrix read_activations_text(const std::string& path);
ActivationMatrix read_activations_binary(const std::string& path);
void write_activations_text(const ActivationMatrix& m, const std::string& path);

/// CSV rendering of a mantissa histogram (bin_lo,bin_hi,count) and a minimal
/// SVG bar chart.
std::string histogram_csv(const MantissaHistogram& h);
std::string histogram_svg(const MantissaHistogram& h);

}  // namespace numline
