#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wickwz {

/// Pairwise (cascade) summation. Used for every ensemble reduction so that
/// results do not depend on thread count or accumulation order.
double pairwise_sum(std::span<const double> v);

double pairwise_mean(std::span<const double> v);

/// Unbiased sample variance, two-pass with pairwise sums.
double sample_variance(std::span<const double> v);

/// Standard error of the sample mean, sqrt(var/n).
double standard_error(std::span<const double> v);

/// Compensated accumulator for order-sensitive sums (bin totals).
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Mean with the largest ceil(trim*n) values dropped. The inverse-moment
/// estimator applies this to a positive heavy-tailed sample, so only the
/// upper tail is trimmed. trim = 0 is the plain mean.
double trimmed_mean(std::span<const double> values, double trim);

struct BootstrapResult {
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  uint64_t seed = 0;
  int n_resamples = 0;
};

/// Nonparametric bootstrap of the (trimmed) mean. Deterministic for a fixed
/// seed; the percentile interval is the 2.5/97.5 range of resample estimates.
BootstrapResult bootstrap_mean(std::span<const double> values, int n_resamples, uint64_t seed,
                               double trim = 0.0);

}  // namespace wickwz
