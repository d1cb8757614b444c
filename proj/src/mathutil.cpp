#include "numline/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace numline {

namespace {

// 10^0 .. 10^17; every entry is exactly representable in a double.
constexpr double kPow10[18] = {
    1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8,
    1e9,  1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16, 1e17,
};

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

double pow10i(int e) {
  if (e < 0 || e > 17) throw std::out_of_range("pow10i: exponent outside [0, 17]");
  return kPow10[e];
}

double stdnormal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double stdnormal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// Wichura's AS241 (PPND16) rational approximation, polished with one Newton
// step against the erfc-based CDF.
double stdnormal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("stdnormal_quantile: p must lie in (0, 1)");
  }
  const double q = p - 0.5;
  double x;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
  } else {
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
    }
    if (q < 0.0) x = -x;
  }
  // One Newton correction; the pdf underflows only far beyond double range
  // of attainable p, so the guard rarely triggers.
  const double pdf = stdnormal_pdf(x);
  if (pdf > 0.0) x -= (stdnormal_cdf(x) - p) / pdf;
  return x;
}

double stdnormal_interval(double alpha, double beta) {
  if (beta < alpha) std::swap(alpha, beta);
  double z;
  if (alpha >= 0.0) {
    // both in the upper tail: difference of complementary CDFs
    z = 0.5 * (std::erfc(alpha * kInvSqrt2) - std::erfc(beta * kInvSqrt2));
  } else if (beta <= 0.0) {
    z = 0.5 * (std::erfc(-beta * kInvSqrt2) - std::erfc(-alpha * kInvSqrt2));
  } else {
    z = stdnormal_cdf(beta) - stdnormal_cdf(alpha);
  }
  return std::max(z, 0.0);
}

namespace {

// log Phi(-x) for x >= 0; switches to the asymptotic series once erfc
// underflows (x beyond ~38)
double log_upper_tail(double x) {
  const double p = 0.5 * std::erfc(x * kInvSqrt2);
  if (p > 0.0) return std::log(p);
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2));
  return -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) - std::log(x) + std::log(series);
}

}  // namespace

double log_stdnormal_interval(double alpha, double beta) {
  if (beta < alpha) std::swap(alpha, beta);
  if (alpha == beta) return -std::numeric_limits<double>::infinity();
  if (alpha < 0.0 && beta > 0.0) {
    return std::log(stdnormal_cdf(beta) - stdnormal_cdf(alpha));  // O(1) mass
  }
  // reflect a lower-tail interval into the upper tail
  double a = alpha, b = beta;
  if (b <= 0.0) {
    a = -beta;
    b = -alpha;
  }
  const double log_a = log_upper_tail(a);  // the larger tail probability
  const double log_b = log_upper_tail(b);
  return log_a + std::log1p(-std::exp(log_b - log_a));
}

double log_sum_exp(const double* v, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (!std::isfinite(m)) return m;  // all -inf (or a stray +inf propagates)
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(v[i])) s += std::exp(v[i] - m);
  }
  return m + std::log(s);
}

}  // namespace numline
