#include "wickwz/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "wickwz/errors.hpp"
#include "wickwz/rng.hpp"

namespace wickwz {

namespace {

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_sum_impl(v.data(), v.size()); }

double pairwise_mean(std::span<const double> v) {
  if (v.empty()) raise(Errc::too_few_samples, "mean of empty sample");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) raise(Errc::too_few_samples, "variance needs at least 2 samples");
  const double mu = pairwise_mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mu;
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

double standard_error(std::span<const double> v) {
  return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(Errc::dimension_mismatch, "least_squares: size mismatch");
  if (x.size() < 2) raise(Errc::insufficient_data, "least_squares needs at least 2 points");
  const double mx = pairwise_mean(x);
  const double my = pairwise_mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) raise(Errc::insufficient_data, "least_squares: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double trimmed_mean(std::span<const double> values, double trim) {
  if (values.empty()) raise(Errc::too_few_samples, "trimmed_mean of empty sample");
  if (trim < 0.0 || trim >= 0.5) raise(Errc::out_of_range, "trim must be in [0, 0.5)");
  if (trim == 0.0) return pairwise_mean(values);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t drop = static_cast<std::size_t>(
      std::ceil(trim * static_cast<double>(sorted.size())));
  const std::size_t keep = sorted.size() - std::min(drop, sorted.size() - 1);
  return pairwise_mean(std::span<const double>(sorted.data(), keep));
}

BootstrapResult bootstrap_mean(std::span<const double> values, int n_resamples, uint64_t seed,
                               double trim) {
  if (values.empty()) raise(Errc::too_few_samples, "bootstrap of empty sample");
  if (n_resamples < 2) raise(Errc::insufficient_data, "need at least 2 bootstrap resamples");
  const std::size_t n = values.size();
  std::vector<double> estimates(static_cast<std::size_t>(n_resamples));
  std::vector<double> resample(n);
  for (int b = 0; b < n_resamples; ++b) {
    CounterRng rng(derive_seed(seed, static_cast<uint64_t>(b)));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = static_cast<std::size_t>(rng.next_u64() % n);
      resample[i] = values[idx];
    }
    estimates[static_cast<std::size_t>(b)] = trimmed_mean(resample, trim);
  }
  std::vector<double> sorted = estimates;
  std::sort(sorted.begin(), sorted.end());
  BootstrapResult r;
  r.seed = seed;
  r.n_resamples = n_resamples;
  r.se = std::sqrt(sample_variance(estimates));
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  r.ci_lo = quantile(0.025);
  r.ci_hi = quantile(0.975);
  return r;
}

}  // namespace wickwz
