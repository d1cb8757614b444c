#pragma once

#include <array>
#include <string>

#include "numline/numparse.hpp"
#include "numline/rng.hpp"

namespace numline {

/// Log-normal restricted and renormalized to [lower, upper).
/// mu/sigma live in natural-log space.
struct TruncLogNormal {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 1.0;
  double upper = 10.0;
};

/// Throws std::invalid_argument for sigma <= 0 or inverted/non-positive bounds.
void validate(const TruncLogNormal& d);

/// log pdf at v; -inf outside [lower, upper).
double tln_logpdf(const TruncLogNormal& d, double v);

/// CDF at v, clamped to [0, 1].
double tln_cdf(const TruncLogNormal& d, double v);

/// Inverse-CDF sample; the result always lies in [lower, upper).
double tln_sample(const TruncLogNormal& d, Rng& rng);

/// Median; equals the log-space midpoint when mu is centered.
double tln_median(const TruncLogNormal& d);

/// Discrete-latent-exponent decoder parameters: a 17-way multinomial over
/// decades plus one truncated log-normal per decade with per-component mu
/// and a shared scale. sigma is stored in log space so optimization stays
/// unconstrained; training clamps log_sigma to [ln 1e-3, ln 10] to avoid a
/// degenerate truncation mass.
struct DExpParams {
  std::array<double, kNumDecades> exponent_logits{};
  std::array<double, kNumDecades> mu{};
  double log_sigma = 0.0;

  double sigma() const;
  TruncLogNormal component(int k) const;  // support [10^k, 10^(k+1))
  std::array<double, kNumDecades> exponent_probs() const;
};

inline constexpr double kLogSigmaMin = -6.907755278982137;  // ln 1e-3
inline constexpr double kLogSigmaMax = 2.302585092994046;   // ln 10

struct DExpGrad {
  std::array<double, kNumDecades> d_logits{};
  std::array<double, kNumDecades> d_mu{};
  double d_log_sigma = 0.0;
};

/// Negative log density of v under the mixture, log-sum-exp stabilized.
/// Exactly one component's support contains v (decades partition the range),
/// but the sum is implemented generically. Throws std::out_of_range for v
/// outside [1, 1e16].
double dexp_nll(const DExpParams& p, double v);

/// Analytic gradient of dexp_nll with respect to every parameter.
DExpGrad dexp_grad(const DExpParams& p, double v);

/// Point prediction: the median of the highest-probability component, ties
/// broken toward the smaller exponent. Log-space medians minimize LogMAE.
double dexp_predict(const DExpParams& p);

/// Draw an exponent from the multinomial, then a mantissa-scaled value from
/// that component.
double dexp_sample(const DExpParams& p, Rng& rng);

/// JSON round trip at full double precision: {"logits": [...], "mu": [...],
/// "log_sigma": x}.
std::string dexp_to_json(const DExpParams& p);
DExpParams dexp_from_json(const std::string& text);

}  // namespace numline
