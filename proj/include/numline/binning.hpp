#pragma once

#include <vector>

#include "numline/numparse.hpp"

namespace numline {

enum class RepRule { ArithmeticMean, GeometricMean };

/// Fixed log-decade discretization of [1, 1e16]: bin k covers
/// [10^k, 10^(k+1)) for k in 0..15 and bin 16 holds the closed upper
/// boundary 1e16. 17 bins total.
struct DecadeBins {
  RepRule rule = RepRule::ArithmeticMean;
  static constexpr int n_bins = kNumDecades;
};

/// Corpus-fit equal-frequency bins with upper-inclusive edges: bin k covers
/// (edges[k-1], edges[k]], bin 0 covers everything up to edges[0], and
/// values above the last edge clamp into the last bin.
struct FreqBins {
  std::vector<double> edges;            // strictly ascending
  std::vector<double> representatives;  // one per bin, inside its interval
  int n_bins() const { return static_cast<int>(edges.size()); }
};

/// Bin index of a value. DecadeBins: equals decompose(value).exponent and
/// throws std::out_of_range outside [1, 1e16]. FreqBins: any positive real,
/// clamped to the outermost bins.
int bin_of(double value, const DecadeBins& bins);
int bin_of(double value, const FreqBins& bins);

/// Decade representative: 5 * 10^k under the arithmetic-mean rule,
/// 10^(k+0.5) under the geometric-mean rule.
/// Throws std::out_of_range for a bad index.
double representative(int bin, const DecadeBins& bins);
double representative(int bin, const FreqBins& bins);

/// Equal-frequency fit: sorts the values, cuts at ranks i*n/n_bins, and uses
/// each cut value as an upper-inclusive edge. Duplicate cut values merge
/// (heavily tied data can realize fewer than n_bins bins, never empty ones).
/// Each bin's representative is the arithmetic mean of the training values
/// it contains. Throws std::invalid_argument on empty input or n_bins < 1.
FreqBins fit_freq_bins(std::vector<double> values, int n_bins);

/// The 21 upper-inclusive edges of the equal-frequency vocabulary fit on a
/// financial newswire corpus, shipped as a fixture (the corpus itself is not
/// distributed, so representatives default to the edge values).
const std::vector<double>& newswire_bin_edges();

/// FreqBins built from newswire_bin_edges().
FreqBins newswire_bins();

}  // namespace numline
