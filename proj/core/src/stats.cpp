#include "wickwz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wickwz/errors.hpp"
#include "wickwz/numerics.hpp"
#include "wickwz/parallel.hpp"
#include "wickwz/rng.hpp"

namespace wickwz {

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) raise(Errc::too_few_samples, "bandwidth needs at least 2 samples");
  const double sd = std::sqrt(sample_variance(samples));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double scale = sd;
  if (iqr > 0.0) scale = std::min(scale, iqr / 1.34);
  if (!(scale > 0.0)) raise(Errc::too_few_samples, "degenerate sample for bandwidth selection");
  return 0.9 * scale * std::pow(static_cast<double>(samples.size()), -0.2);
}

DensityEstimate kde_density(std::span<const double> samples, std::optional<double> bandwidth,
                            std::vector<double> grid_x, double t, int threads) {
  if (samples.size() < 100) raise(Errc::too_few_samples, "KDE needs at least 100 samples");
  if (grid_x.size() < 2) raise(Errc::insufficient_data, "KDE needs an evaluation grid");
  const double h = bandwidth.value_or(silverman_bandwidth(samples));
  if (!(h > 0.0)) raise(Errc::out_of_range, "bandwidth must be positive");

  DensityEstimate est;
  est.t = t;
  est.bandwidth = h;
  est.n_samples = samples.size();
  est.grid_x = std::move(grid_x);
  est.density.assign(est.grid_x.size(), 0.0);

  const double inv_h = 1.0 / h;
  const double norm = inv_h / (std::sqrt(2.0 * M_PI) * static_cast<double>(samples.size()));
  parallel_for(est.grid_x.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const double x = est.grid_x[j];
      double acc = 0.0;
      for (double s : samples) {
        const double u = (x - s) * inv_h;
        if (u > -8.0 && u < 8.0) acc += std::exp(-0.5 * u * u);
      }
      est.density[j] = norm * acc;
    }
  });
  return est;
}

double density_l1(const std::vector<double>& grid_x, std::span<const double> p,
                  std::span<const double> q) {
  if (grid_x.size() != p.size() || p.size() != q.size())
    raise(Errc::dimension_mismatch, "density_l1: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid_x.size(); ++i) {
    const double f0 = std::fabs(p[i] - q[i]);
    const double f1 = std::fabs(p[i + 1] - q[i + 1]);
    acc += 0.5 * (f0 + f1) * (grid_x[i + 1] - grid_x[i]);
  }
  return acc;
}

GEstimate regress_g(std::span<const double> x_samples, std::span<const double> d_samples,
                    std::size_t n_bins, std::size_t min_count, double r) {
  if (x_samples.size() != d_samples.size())
    raise(Errc::dimension_mismatch, "regress_g: sample arrays must pair up");
  if (x_samples.size() < 2) raise(Errc::too_few_samples, "regress_g needs paired samples");
  if (n_bins < 1) raise(Errc::out_of_range, "regress_g needs at least one bin");

  const auto [lo_it, hi_it] = std::minmax_element(x_samples.begin(), x_samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) raise(Errc::too_few_samples, "regress_g: degenerate x range");
  const double width = (hi - lo) / static_cast<double>(n_bins);

  GEstimate est;
  est.r = r;
  est.n_samples = x_samples.size();
  est.min_count = min_count;
  est.bins.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    est.bins[b].lo = lo + width * static_cast<double>(b);
    est.bins[b].hi = (b + 1 == n_bins) ? hi : lo + width * static_cast<double>(b + 1);
  }

  std::vector<KahanSum> sum_d(n_bins), sum_x(n_bins), sum_d2(n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (std::size_t i = 0; i < x_samples.size(); ++i) {
    std::size_t b = static_cast<std::size_t>((x_samples[i] - lo) / width);
    if (b >= n_bins) b = n_bins - 1;  // the max sample lands in the last bin
    counts[b]++;
    sum_d[b].add(d_samples[i]);
    sum_x[b].add(x_samples[i]);
    sum_d2[b].add(d_samples[i] * d_samples[i]);
  }

  KahanSum total_d;
  bool any_valid = false;
  for (std::size_t b = 0; b < n_bins; ++b) {
    GBin& bin = est.bins[b];
    bin.count = counts[b];
    total_d.add(sum_d[b].value());
    if (counts[b] == 0) continue;
    const double n = static_cast<double>(counts[b]);
    bin.mean_d = sum_d[b].value() / n;
    bin.mean_x = sum_x[b].value() / n;
    if (counts[b] >= 2) {
      const double var = std::max(0.0, (sum_d2[b].value() - n * bin.mean_d * bin.mean_d) / (n - 1.0));
      bin.stderr_d = std::sqrt(var / n);
    }
    bin.valid = counts[b] >= min_count;
    any_valid = any_valid || bin.valid;
  }
  if (!any_valid) raise(Errc::empty_bins, "no bin reaches min_count");
  est.reallocated_mean = total_d.value() / static_cast<double>(est.n_samples);
  return est;
}

namespace {

// psi(u) = exp{-1/(1-u^2)} on |u| < 1; psi' = psi * a, psi'' = psi * (a^2 + a')
// with a(u) = -2u/(1-u^2)^2 and a'(u) = -2(1+3u^2)/(1-u^2)^3.
struct BumpFactor {
  double value = 0.0, d1 = 0.0, d2 = 0.0;
};

BumpFactor bump_factor(double u) {
  BumpFactor f;
  const double one_minus = 1.0 - u * u;
  if (one_minus <= 0.0) return f;
  f.value = std::exp(-1.0 / one_minus);
  const double a = -2.0 * u / (one_minus * one_minus);
  const double ap = -2.0 * (1.0 + 3.0 * u * u) / (one_minus * one_minus * one_minus);
  f.d1 = f.value * a;
  f.d2 = f.value * (a * a + ap);
  return f;
}

}  // namespace

double TestFunction::value(double t, double x) const {
  if (is_zero) return 0.0;
  return bump_factor((t - center_t) / width_t).value * bump_factor((x - center_x) / width_x).value;
}

double TestFunction::dt(double t, double x) const {
  if (is_zero) return 0.0;
  return bump_factor((t - center_t) / width_t).d1 / width_t *
         bump_factor((x - center_x) / width_x).value;
}

double TestFunction::dx(double t, double x) const {
  if (is_zero) return 0.0;
  return bump_factor((t - center_t) / width_t).value *
         bump_factor((x - center_x) / width_x).d1 / width_x;
}

double TestFunction::dxx(double t, double x) const {
  if (is_zero) return 0.0;
  return bump_factor((t - center_t) / width_t).value *
         bump_factor((x - center_x) / width_x).d2 / (width_x * width_x);
}

TestFunction TestFunction::zero_function() {
  TestFunction f;
  f.id = "zero";
  f.is_zero = true;
  return f;
}

TestFunction make_bump(double center_t, double width_t, double center_x, double width_x) {
  if (!(width_t > 0.0) || !(width_x > 0.0))
    raise(Errc::support_out_of_range, "bump widths must be positive");
  TestFunction f;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "bump(t=%g+-%g, x=%g+-%g)", center_t, width_t, center_x,
                width_x);
  f.id = buf;
  f.center_t = center_t;
  f.width_t = width_t;
  f.center_x = center_x;
  f.width_x = width_x;
  return f;
}

ResidualReport fp_residual(const EnsembleRun& run, const TestFunction& phi,
                           bool drop_diffusion_term, int threads) {
  ResidualReport report;
  report.test_function_id = phi.id + (drop_diffusion_term ? " [control]" : "");
  report.n_paths = run.n_paths;
  report.bootstrap_seed = derive_seed(run.master_seed, 0xf9ULL);
  if (phi.is_zero) {
    report.pass = true;
    return report;
  }
  if (run.deta.empty()) raise(Errc::no_derivatives, "run has no D_{eta_r}X samples");
  const double s = run.model.s;
  const double T = run.partition->horizon();
  if (!(phi.t_lo() > s + kTimeTol) || !(phi.t_hi() < T - kTimeTol))
    raise(Errc::unsupported_test_function,
          "test-function support must lie strictly inside (s, T)");

  const std::size_t nr = run.deta_r.size();
  // The integrand jumps where D_{eta_r}X does (at breakpoints), so the
  // trapezoid runs within each subinterval segment; the panel that closes a
  // segment extends the last interior value to the breakpoint rather than
  // averaging across the jump. The closing panel of the final segment ends
  // at the horizon, where the test function has already vanished.
  const Partition& part = *run.partition;
  std::vector<double> seg_close(nr, 0.0);  // right end of the panel starting at node j
  std::vector<char> seg_last(nr, 0);       // node j is the last one inside its segment
  std::vector<char> seg_open(nr, 0);       // node j starts a segment
  for (std::size_t j = 0; j < nr; ++j) {
    const std::size_t k = part.locate(run.deta_r[j]);
    const double right = part.right(k);
    if (j + 1 == nr || run.deta_r[j + 1] >= right - kTimeTol) {
      seg_last[j] = 1;
      seg_close[j] = right;
    }
    if (j == 0 || run.deta_r[j - 1] < part.left(k) - kTimeTol) seg_open[j] = 1;
  }
  std::vector<double> per_path(run.n_paths, 0.0);
  parallel_for(run.n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double prev_f = 0.0;
      double prev_r = 0.0;
      double acc = 0.0;
      for (std::size_t j = 0; j < nr; ++j) {
        const double r = run.deta_r[j];
        const double x = run.x_at_deta[i * nr + j];
        double f = phi.dt(r, x) + phi.dx(r, x) * run.model.drift.b(r, x);
        if (!drop_diffusion_term) f += phi.dxx(r, x) * x * run.deta[i * nr + j];
        if (!seg_open[j]) acc += 0.5 * (prev_f + f) * (r - prev_r);
        if (seg_last[j]) {
          // Close the segment with the value extrapolated to the breakpoint
          // from inside; the integrand may jump across it.
          const double w = seg_close[j] - r;
          double f_edge = f;
          if (!seg_open[j] && r > prev_r)
            f_edge = f + (f - prev_f) * w / (r - prev_r);
          acc += 0.5 * w * (f + f_edge);
        }
        prev_f = f;
        prev_r = r;
      }
      per_path[i] = acc;
    }
  });

  report.residual = pairwise_mean(per_path);
  const BootstrapResult boot = bootstrap_mean(per_path, 200, report.bootstrap_seed);
  report.std_error = boot.se;
  report.pass = std::fabs(report.residual) <= 3.0 * report.std_error;
  return report;
}

MeanPreservationReport mean_preservation(const EnsembleRun& run, double x0) {
  if (!run.model.drift.is_zero() ||
      run.model.init.kind() != InitialCondition::Kind::deterministic)
    raise(Errc::wrong_model, "mean preservation is stated for zero drift, deterministic data");

  MeanPreservationReport report;
  report.x0 = x0;
  report.low_power = run.n_paths < 100;
  report.has_naive = !run.bpoly.empty() && std::fabs(run.model.s) <= kTimeTol;
  report.all_pass = true;

  const std::size_t g = run.grid.size();
  std::vector<double> column(run.n_paths);
  std::vector<double> naive(run.n_paths);
  const std::vector<double> unit(run.partition->n(), 1.0);
  for (std::size_t j = 0; j < g; ++j) {
    MeanPreservationRow row;
    row.t = run.grid[j];
    for (std::size_t i = 0; i < run.n_paths; ++i) column[i] = run.x[i * g + j];
    row.mean = pairwise_mean(column);
    // One path cannot reject anything: the band is infinitely wide.
    row.se = run.n_paths >= 2 ? standard_error(column)
                              : std::numeric_limits<double>::infinity();
    row.pass = std::fabs(row.mean - x0) <= 3.0 * row.se;
    if (report.has_naive) {
      for (std::size_t i = 0; i < run.n_paths; ++i)
        naive[i] = x0 * std::exp(run.bpoly[i * g + j] - 0.5 * row.t);
      row.naive_mean = pairwise_mean(naive);
      row.naive_se = run.n_paths >= 2 ? standard_error(naive)
                                      : std::numeric_limits<double>::infinity();
      const KernelSlice k0t = KernelSlice(run.partition, 0.0, row.t, unit);
      row.naive_ref = x0 * std::exp(0.5 * (k0t.norm_sq() - row.t));
      row.naive_outside_band = std::fabs(row.naive_mean - x0) > 3.0 * row.naive_se;
    }
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace wickwz
