#pragma once

#include <cstddef>

namespace numline {

/// Exact power of ten as a double; e must lie in [0, 17].
double pow10i(int e);

double stdnormal_pdf(double x);
double stdnormal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1).
/// Throws std::invalid_argument outside the open interval.
double stdnormal_quantile(double p);

/// Phi(beta) - Phi(alpha) for alpha <= beta, computed without catastrophic
/// cancellation when both arguments sit in the same tail.
double stdnormal_interval(double alpha, double beta);

/// log(Phi(beta) - Phi(alpha)), valid far beyond where the linear-space mass
/// underflows (asymptotic tail expansion past erfc's range). -inf only when
/// the interval collapses at double resolution.
double log_stdnormal_interval(double alpha, double beta);

/// log(sum_i exp(v_i)); -inf entries are skipped, all -inf gives -inf.
double log_sum_exp(const double* v, std::size_t n);

}  // namespace numline
