#include "numline/dexp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "numline/mathutil.hpp"

namespace numline {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct TlnTerms {
  double z, alpha, beta, log_mass;
};

TlnTerms tln_terms(const TruncLogNormal& d, double v) {
  const double lv = std::log(v);
  TlnTerms t;
  t.z = (lv - d.mu) / d.sigma;
  t.alpha = (std::log(d.lower) - d.mu) / d.sigma;
  t.beta = (std::log(d.upper) - d.mu) / d.sigma;
  t.log_mass = log_stdnormal_interval(t.alpha, t.beta);
  return t;
}

constexpr double kLogSqrt2Pi = 0.9189385332046727;

}  // namespace

void validate(const TruncLogNormal& d) {
  if (!(d.sigma > 0.0) || !std::isfinite(d.sigma) || !std::isfinite(d.mu)) {
    throw std::invalid_argument("truncated log-normal: sigma must be positive and finite");
  }
  if (!(d.lower > 0.0) || !(d.lower < d.upper) || !std::isfinite(d.upper)) {
    throw std::invalid_argument("truncated log-normal: need 0 < lower < upper");
  }
}

double tln_logpdf(const TruncLogNormal& d, double v) {
  validate(d);
  if (!(v >= d.lower) || !(v < d.upper)) return kNegInf;
  const TlnTerms t = tln_terms(d, v);
  // a window collapsed at double resolution (|mu| astronomically far) has no
  // representable density; report no support rather than fabricate one
  if (!std::isfinite(t.log_mass)) return kNegInf;
  return -0.5 * t.z * t.z - kLogSqrt2Pi - std::log(v) - std::log(d.sigma) - t.log_mass;
}

double tln_cdf(const TruncLogNormal& d, double v) {
  validate(d);
  if (v <= d.lower) return 0.0;
  if (v >= d.upper) return 1.0;
  const TlnTerms t = tln_terms(d, v);
  if (!std::isfinite(t.log_mass)) {
    throw std::invalid_argument("truncated log-normal: degenerate truncation mass");
  }
  return std::clamp(std::exp(log_stdnormal_interval(t.alpha, t.z) - t.log_mass), 0.0, 1.0);
}

namespace {

double tln_quantile(const TruncLogNormal& d, double p) {
  const double alpha = (std::log(d.lower) - d.mu) / d.sigma;
  const double beta = (std::log(d.upper) - d.mu) / d.sigma;
  const double lo = stdnormal_cdf(alpha);
  const double hi = stdnormal_cdf(beta);
  double target = lo + p * (hi - lo);
  target = std::clamp(target, std::numeric_limits<double>::min(), 1.0 - 1e-16);
  double x = std::exp(d.mu + d.sigma * stdnormal_quantile(target));
  if (x < d.lower) x = d.lower;
  if (x >= d.upper) x = std::nextafter(d.upper, d.lower);
  return x;
}

}  // namespace

double tln_sample(const TruncLogNormal& d, Rng& rng) {
  validate(d);
  return tln_quantile(d, rng.uniform01());
}

double tln_median(const TruncLogNormal& d) {
  validate(d);
  const double alpha = (std::log(d.lower) - d.mu) / d.sigma;
  const double beta = (std::log(d.upper) - d.mu) / d.sigma;
  // midpoint of the two CDF values; symmetric-stable form of Phi(a) + Z/2
  double target = 0.5 * (stdnormal_cdf(alpha) + stdnormal_cdf(beta));
  target = std::clamp(target, std::numeric_limits<double>::min(), 1.0 - 1e-16);
  double x = std::exp(d.mu + d.sigma * stdnormal_quantile(target));
  if (x < d.lower) x = d.lower;
  if (x >= d.upper) x = std::nextafter(d.upper, d.lower);
  return x;
}

double DExpParams::sigma() const { return std::exp(log_sigma); }

TruncLogNormal DExpParams::component(int k) const {
  if (k < 0 || k >= kNumDecades) throw std::out_of_range("DExpParams::component: bad decade");
  return TruncLogNormal{mu[static_cast<std::size_t>(k)], sigma(), pow10i(k), pow10i(k + 1)};
}

std::array<double, kNumDecades> DExpParams::exponent_probs() const {
  const double lse = log_sum_exp(exponent_logits.data(), exponent_logits.size());
  std::array<double, kNumDecades> p{};
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(exponent_logits[k] - lse);
  return p;
}

double dexp_nll(const DExpParams& p, double v) {
  decompose(v);  // range check
  const double lse = log_sum_exp(p.exponent_logits.data(), p.exponent_logits.size());
  std::array<double, kNumDecades> terms;
  for (int k = 0; k < kNumDecades; ++k) {
    const TruncLogNormal c = p.component(k);
    if (v >= c.lower && v < c.upper) {
      // v == 1e16 falls through to component 16 ([1e16, 1e17))
      terms[static_cast<std::size_t>(k)] =
          (p.exponent_logits[static_cast<std::size_t>(k)] - lse) + tln_logpdf(c, v);
    } else {
      terms[static_cast<std::size_t>(k)] = kNegInf;
    }
  }
  return -log_sum_exp(terms.data(), terms.size());
}

DExpGrad dexp_grad(const DExpParams& p, double v) {
  decompose(v);
  const auto probs = p.exponent_probs();
  const double sigma = p.sigma();

  // posterior responsibilities; the decade partition makes them one-hot
  std::array<double, kNumDecades> terms;
  std::array<TlnTerms, kNumDecades> tln;
  const double lse = log_sum_exp(p.exponent_logits.data(), p.exponent_logits.size());
  for (int k = 0; k < kNumDecades; ++k) {
    const std::size_t ki = static_cast<std::size_t>(k);
    const TruncLogNormal c = p.component(k);
    if (v >= c.lower && v < c.upper) {
      tln[ki] = tln_terms(c, v);
      terms[ki] = (p.exponent_logits[ki] - lse) + tln_logpdf(c, v);
    } else {
      terms[ki] = kNegInf;
    }
  }
  const double log_mix = log_sum_exp(terms.data(), terms.size());

  DExpGrad g;
  for (int k = 0; k < kNumDecades; ++k) {
    const std::size_t ki = static_cast<std::size_t>(k);
    const double r = std::isfinite(terms[ki]) ? std::exp(terms[ki] - log_mix) : 0.0;
    g.d_logits[ki] = probs[ki] - r;
    if (r == 0.0) continue;
    const TlnTerms& t = tln[ki];
    // phi(x)/mass evaluated in log space so far-tail windows keep finite
    // gradients rather than dividing underflowed quantities
    const double ratio_a =
        std::exp(-0.5 * t.alpha * t.alpha - kLogSqrt2Pi - t.log_mass);
    const double ratio_b = std::exp(-0.5 * t.beta * t.beta - kLogSqrt2Pi - t.log_mass);
    const double dlogf_dmu = t.z / sigma + (ratio_b - ratio_a) / sigma;
    const double dlogf_dls = t.z * t.z - 1.0 + (t.beta * ratio_b - t.alpha * ratio_a);
    g.d_mu[ki] = -r * dlogf_dmu;
    g.d_log_sigma += -r * dlogf_dls;
  }
  return g;
}

double dexp_predict(const DExpParams& p) {
  const auto probs = p.exponent_probs();
  int best = 0;
  for (int k = 1; k < kNumDecades; ++k) {
    if (probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(best)]) best = k;
  }
  return tln_median(p.component(best));
}

double dexp_sample(const DExpParams& p, Rng& rng) {
  const auto probs = p.exponent_probs();
  const double u = rng.uniform01();
  double acc = 0.0;
  int pick = kNumDecades - 1;
  for (int k = 0; k < kNumDecades; ++k) {
    acc += probs[static_cast<std::size_t>(k)];
    if (u < acc) {
      pick = k;
      break;
    }
  }
  return tln_sample(p.component(pick), rng);
}

std::string dexp_to_json(const DExpParams& p) {
  nlohmann::json j;
  j["logits"] = p.exponent_logits;
  j["mu"] = p.mu;
  j["log_sigma"] = p.log_sigma;
  return j.dump(2) + "\n";
}

DExpParams dexp_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DExpParams p;
  const auto logits = j.at("logits").get<std::vector<double>>();
  const auto mu = j.at("mu").get<std::vector<double>>();
  if (logits.size() != kNumDecades || mu.size() != kNumDecades) {
    throw std::invalid_argument("dexp_from_json: expected 17 logits and 17 mu entries");
  }
  std::copy(logits.begin(), logits.end(), p.exponent_logits.begin());
  std::copy(mu.begin(), mu.end(), p.mu.begin());
  p.log_sigma = j.at("log_sigma").get<double>();
  return p;
}

}  // namespace numline
