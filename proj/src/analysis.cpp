#include "numline/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "numline/io.hpp"
#include "numline/numparse.hpp"

namespace numline {

int MantissaHistogram::mode_bin() const {
  int best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

MantissaHistogram mantissa_histogram(std::span<const double> values, int n_bins) {
  if (values.empty()) throw std::invalid_argument("mantissa_histogram: empty input");
  if (n_bins < 2) throw std::invalid_argument("mantissa_histogram: n_bins must be >= 2");

  MantissaHistogram h;
  const double width = 9.0 / n_bins;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i) {
    h.edges[static_cast<std::size_t>(i)] = 1.0 + width * i;
  }
  h.edges.back() = 10.0;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    const double m = decompose(v).mantissa;
    int bin = static_cast<int>((m - 1.0) / width);
    bin = std::clamp(bin, 0, n_bins - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  h.total = values.size();
  return h;
}

BenfordReport benford_deviation(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("benford_deviation: empty input");
  BenfordReport r;
  for (int d = 1; d <= 9; ++d) {
    r.reference[static_cast<std::size_t>(d)] = std::log10(1.0 + 1.0 / d);
  }
  std::array<std::size_t, 10> counts{};
  for (double v : values) {
    int digit = static_cast<int>(decompose(v).mantissa);  // floor of [1,10) mantissa
    digit = std::clamp(digit, 1, 9);
    ++counts[static_cast<std::size_t>(digit)];
  }
  r.n = values.size();
  double l1 = 0.0;
  for (int d = 1; d <= 9; ++d) {
    const std::size_t di = static_cast<std::size_t>(d);
    r.frequency[di] = static_cast<double>(counts[di]) / static_cast<double>(r.n);
    l1 += std::abs(r.frequency[di] - r.reference[di]);
  }
  r.tv_distance = 0.5 * l1;
  return r;
}

namespace {

// rank of each neuron within its row: 0 = most activated; ties toward the
// lower neuron index
void row_ranks(const ActivationMatrix& a, std::size_t row, std::vector<int>& order,
               std::vector<int>& rank) {
  const std::size_t d = a.cols;
  order.resize(d);
  rank.resize(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    const double ax = a.at(row, static_cast<std::size_t>(x));
    const double ay = a.at(row, static_cast<std::size_t>(y));
    if (ax != ay) return ax > ay;
    return x < y;
  });
  for (std::size_t pos = 0; pos < d; ++pos) {
    rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
  }
}

void check_probe_args(const ActivationMatrix& a, std::span<const int> labels, int k) {
  if (a.rows == 0 || a.cols == 0 || a.data.size() != a.rows * a.cols) {
    throw std::invalid_argument("neuron probe: shape mismatch in activation matrix");
  }
  if (labels.size() != a.rows) {
    throw std::invalid_argument("neuron probe: shape mismatch between labels and rows");
  }
  if (k < 1 || static_cast<std::size_t>(k) > a.cols) {
    throw std::invalid_argument("neuron probe: k must lie in [1, D]");
  }
}

}  // namespace

std::vector<NeuronProbeResult> neuron_pr(const ActivationMatrix& activations,
                                         std::span<const int> labels, int target_exponent,
                                         int k) {
  check_probe_args(activations, labels, k);

  const std::size_t d = activations.cols;
  std::vector<std::size_t> triggered(d, 0), hits(d, 0);
  std::size_t positives = 0;
  std::vector<int> order, rank;
  for (std::size_t row = 0; row < activations.rows; ++row) {
    const bool positive = labels[row] == target_exponent;
    if (positive) ++positives;
    row_ranks(activations, row, order, rank);
    for (int pos = 0; pos < k; ++pos) {
      const std::size_t neuron = static_cast<std::size_t>(order[static_cast<std::size_t>(pos)]);
      ++triggered[neuron];
      if (positive) ++hits[neuron];
    }
  }

  std::vector<NeuronProbeResult> results(d);
  for (std::size_t j = 0; j < d; ++j) {
    NeuronProbeResult& r = results[j];
    r.neuron = static_cast<int>(j);
    r.k = k;
    r.target_exponent = target_exponent;
    r.triggered = triggered[j];
    r.hits = hits[j];
    r.positives = positives;
    r.precision = triggered[j] == 0
                      ? 0.0
                      : static_cast<double>(hits[j]) / static_cast<double>(triggered[j]);
    r.recall =
        positives == 0 ? 0.0 : static_cast<double>(hits[j]) / static_cast<double>(positives);
    const double pr = r.precision + r.recall;
    r.f1 = pr == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / pr;
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const NeuronProbeResult& x, const NeuronProbeResult& y) {
                     if (x.f1 != y.f1) return x.f1 > y.f1;
                     return x.neuron < y.neuron;
                   });
  return results;
}

std::vector<std::pair<double, double>> neuron_pr_curve(const ActivationMatrix& activations,
                                                       std::span<const int> labels,
                                                       int target_exponent, int neuron) {
  check_probe_args(activations, labels, 1);
  if (neuron < 0 || static_cast<std::size_t>(neuron) >= activations.cols) {
    throw std::invalid_argument("neuron_pr_curve: neuron index out of range");
  }

  const std::size_t d = activations.cols;
  // histogram the neuron's per-row rank, split by label
  std::vector<std::size_t> pos_at(d, 0), neg_at(d, 0);
  std::size_t positives = 0;
  std::vector<int> order, rank;
  for (std::size_t row = 0; row < activations.rows; ++row) {
    row_ranks(activations, row, order, rank);
    const int rk = rank[static_cast<std::size_t>(neuron)];
    if (labels[row] == target_exponent) {
      ++positives;
      ++pos_at[static_cast<std::size_t>(rk)];
    } else {
      ++neg_at[static_cast<std::size_t>(rk)];
    }
  }

  std::vector<std::pair<double, double>> curve;
  curve.reserve(d);
  std::size_t cum_pos = 0, cum_neg = 0;
  for (std::size_t cut = 0; cut < d; ++cut) {  // cutoff k = cut + 1
    cum_pos += pos_at[cut];
    cum_neg += neg_at[cut];
    const std::size_t trig = cum_pos + cum_neg;
    const double precision =
        trig == 0 ? 0.0 : static_cast<double>(cum_pos) / static_cast<double>(trig);
    const double recall =
        positives == 0 ? 0.0 : static_cast<double>(cum_pos) / static_cast<double>(positives);
    curve.emplace_back(precision, recall);
  }
  return curve;
}

namespace {

std::pair<std::size_t, std::size_t> parse_header(const std::string& line) {
  std::istringstream ss(line);
  long long n = 0, d = 0;
  if (!(ss >> n >> d) || n < 1 || d < 1) {
    throw std::runtime_error("activation file: header must be 'N D'");
  }
  return {static_cast<std::size_t>(n), static_cast<std::size_t>(d)};
}

}  // namespace

ActivationMatrix read_activations_text(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error("activation file: empty " + path);
  auto [n, d] = parse_header(lines[0]);
  ActivationMatrix m{n, d, {}};
  m.data.reserve(n * d);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::string row = lines[i];
    std::replace(row.begin(), row.end(), ',', ' ');
    std::istringstream ss(row);
    double v;
    while (ss >> v) m.data.push_back(v);
  }
  if (m.data.size() != n * d) {
    throw std::runtime_error("activation file: expected " + std::to_string(n * d) +
                             " values, got " + std::to_string(m.data.size()));
  }
  return m;
}

ActivationMatrix read_activations_binary(const std::string& path) {
  const std::string blob = read_file(path);
  const std::size_t nl = blob.find('\n');
  if (nl == std::string::npos) throw std::runtime_error("activation file: missing header line");
  auto [n, d] = parse_header(blob.substr(0, nl));
  const std::size_t need = n * d * sizeof(double);
  if (blob.size() - nl - 1 < need) {
    throw std::runtime_error("activation file: truncated binary payload");
  }
  ActivationMatrix m{n, d, std::vector<double>(n * d)};
  std::memcpy(m.data.data(), blob.data() + nl + 1, need);
  return m;
}

void write_activations_text(const ActivationMatrix& m, const std::string& path) {
  std::string out = std::to_string(m.rows) + " " + std::to_string(m.cols) + "\n";
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) out += ",";
      out += format_double(m.at(r, c));
    }
    out += "\n";
  }
  write_file_atomic(path, out);
}

std::string histogram_csv(const MantissaHistogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += format_double(h.edges[i]) + "," + format_double(h.edges[i + 1]) + "," +
           std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

std::string histogram_svg(const MantissaHistogram& h) {
  const int width = 640, height = 360, margin = 40;
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  const std::size_t max_count = *std::max_element(h.counts.begin(), h.counts.end());

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double bar_w = plot_w / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double frac =
        max_count == 0 ? 0.0
                       : static_cast<double>(h.counts[i]) / static_cast<double>(max_count);
    const double bh = frac * plot_h;
    svg << "<rect x=\"" << margin + bar_w * static_cast<double>(i) << "\" y=\""
        << margin + plot_h - bh << "\" width=\"" << bar_w * 0.9 << "\" height=\"" << bh
        << "\" fill=\"#4472c4\"/>\n";
  }
  for (int m = 1; m <= 10; ++m) {
    const double x = margin + plot_w * (m - 1) / 9.0;
    svg << "<text x=\"" << x << "\" y=\"" << height - margin / 2
        << "\" font-size=\"12\" text-anchor=\"middle\">" << m << "</text>\n";
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << margin / 2
      << "\" font-size=\"13\" text-anchor=\"middle\">mantissa</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace numline
