#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wickwz/solver.hpp"

namespace wickwz {

struct DensityEstimate {
  double t = 0.0;
  std::vector<double> grid_x;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::size_t n_samples = 0;
};

double silverman_bandwidth(std::span<const double> samples);

/// Gaussian-kernel density estimate on the given abscissae. Needs at least
/// 100 samples; bandwidth defaults to Silverman's rule.
DensityEstimate kde_density(std::span<const double> samples, std::optional<double> bandwidth,
                            std::vector<double> grid_x, double t = 0.0, int threads = 0);

/// Trapezoid integral of |p - q| over the grid.
double density_l1(const std::vector<double>& grid_x, std::span<const double> p,
                  std::span<const double> q);

struct GBin {
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  double mean_x = 0.0;
  double mean_d = 0.0;   // estimate of E[D_{eta_r} X_r | X_r in bin]
  double stderr_d = 0.0;
  bool valid = false;    // count >= min_count
};

struct GEstimate {
  double r = 0.0;
  std::vector<GBin> bins;
  std::size_t n_samples = 0;
  std::size_t min_count = 0;
  /// Exact reallocation check: sum_bins count * mean_d / n equals the plain
  /// sample mean of the derivative samples.
  double reallocated_mean = 0.0;
};

/// Binned conditional-expectation regression m(x) = E[D | X = x]: equal-width
/// bins over the sample range, per-bin means with standard errors. Bins below
/// min_count are reported but flagged invalid. The paper-style diffusion
/// coefficient is x * g(r, x) with g the regression of D/x; per-bin means of
/// D against per-bin means of X give the same object without dividing noise.
GEstimate regress_g(std::span<const double> x_samples, std::span<const double> d_samples,
                    std::size_t n_bins, std::size_t min_count, double r = 0.0);

/// Smooth compactly supported bump phi(t, x) = psi((t-ct)/wt) psi((x-cx)/wx)
/// with psi(u) = exp{-1/(1-u^2)} inside |u| < 1 and 0 outside; closed-form
/// first and second derivatives.
struct TestFunction {
  std::string id;
  double center_t = 0.0, width_t = 0.0, center_x = 0.0, width_x = 0.0;
  bool is_zero = false;

  double value(double t, double x) const;
  double dt(double t, double x) const;
  double dx(double t, double x) const;
  double dxx(double t, double x) const;

  double t_lo() const { return center_t - width_t; }
  double t_hi() const { return center_t + width_t; }

  static TestFunction zero_function();
};

TestFunction make_bump(double center_t, double width_t, double center_x, double width_x);

struct ResidualReport {
  std::string test_function_id;
  double residual = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  bool pass = false;  // |residual| <= 3 * std_error
  uint64_t bootstrap_seed = 0;
};

/// Monte Carlo check of the weak identity
///   0 = E[ integral_s^T ( dphi/dt + dphi/dx b + dphi/dxx X D_{eta_r}X ) dr ]
/// using the run's recorded D_{eta_r} X_r samples, trapezoid in r, bootstrap
/// standard errors. phi must be supported strictly inside (s, T).
/// drop_diffusion_term produces the negative control.
ResidualReport fp_residual(const EnsembleRun& run, const TestFunction& phi,
                           bool drop_diffusion_term = false, int threads = 0);

struct MeanPreservationRow {
  double t = 0.0;
  double mean = 0.0;
  double se = 0.0;
  bool pass = false;
  // Comparator x0 * exp{B^pi_t - t/2}: the Stratonovich-corrected
  // approximation, whose mean depends on the partition.
  double naive_mean = 0.0;
  double naive_se = 0.0;
  double naive_ref = 0.0;  // x0 * exp{(|K_{0,t}|^2 - t)/2}
  bool naive_outside_band = false;
};

struct MeanPreservationReport {
  std::vector<MeanPreservationRow> rows;
  bool all_pass = false;
  bool low_power = false;  // too few paths for the band to mean anything
  bool has_naive = false;
  double x0 = 0.0;
};

/// Per-time sample mean of the Wick ensemble with a 3-standard-error band
/// around x0. Requires zero drift and deterministic data. When the run keeps
/// B^pi values and starts at s = 0, the naive comparator is evaluated too.
MeanPreservationReport mean_preservation(const EnsembleRun& run, double x0);

}  // namespace wickwz
