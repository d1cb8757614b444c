#include "numline/binning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numline/mathutil.hpp"

namespace numline {

int bin_of(double value, const DecadeBins&) { return decompose(value).exponent; }

int bin_of(double value, const FreqBins& bins) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::out_of_range("bin_of: FreqBins require a positive finite value");
  }
  if (bins.edges.empty()) throw std::invalid_argument("bin_of: empty FreqBins");
  auto it = std::lower_bound(bins.edges.begin(), bins.edges.end(), value);
  if (it == bins.edges.end()) --it;  // clamp above the last edge
  return static_cast<int>(it - bins.edges.begin());
}

double representative(int bin, const DecadeBins& bins) {
  if (bin < 0 || bin >= DecadeBins::n_bins) {
    throw std::out_of_range("representative: decade bin index outside [0, 16]");
  }
  return bins.rule == RepRule::ArithmeticMean ? 5.0 * pow10i(bin)
                                              : std::pow(10.0, bin + 0.5);
}

double representative(int bin, const FreqBins& bins) {
  if (bin < 0 || bin >= bins.n_bins()) {
    throw std::out_of_range("representative: frequency bin index out of range");
  }
  return bins.representatives[static_cast<std::size_t>(bin)];
}

FreqBins fit_freq_bins(std::vector<double> values, int n_bins) {
  if (values.empty()) throw std::invalid_argument("fit_freq_bins: empty input");
  if (n_bins < 1) throw std::invalid_argument("fit_freq_bins: n_bins must be >= 1");
  std::sort(values.begin(), values.end());

  const std::size_t n = values.size();
  FreqBins bins;
  for (int i = 1; i <= n_bins; ++i) {
    std::size_t rank = (static_cast<std::size_t>(i) * n) / static_cast<std::size_t>(n_bins);
    if (rank == 0) rank = 1;
    const double edge = values[rank - 1];  // i == n_bins lands on the max
    if (bins.edges.empty() || edge > bins.edges.back()) bins.edges.push_back(edge);
  }

  // membership is by value (upper-inclusive edges), so ties land in one bin
  bins.representatives.reserve(bins.edges.size());
  std::size_t lo = 0;
  for (double edge : bins.edges) {
    std::size_t hi = static_cast<std::size_t>(
        std::upper_bound(values.begin() + static_cast<std::ptrdiff_t>(lo), values.end(), edge) -
        values.begin());
    double sum = 0.0;
    for (std::size_t k = lo; k < hi; ++k) sum += values[k];
    bins.representatives.push_back(sum / static_cast<double>(hi - lo));
    lo = hi;
  }
  return bins;
}

const std::vector<double>& newswire_bin_edges() {
  static const std::vector<double> edges = {
      1,    2,    3,    4,     6,      10,      14,      21,       30,      31, 70,
      415,  2011, 2017, 2018,  5131,   30207,   252178,  1700000,  30000000,
      1152337024,
  };
  return edges;
}

FreqBins newswire_bins() {
  FreqBins bins;
  bins.edges = newswire_bin_edges();
  bins.representatives = bins.edges;  // corpus not shipped; edges stand in
  return bins;
}

}  // namespace numline
