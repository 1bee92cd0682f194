#include "wickwz/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "wickwz/errors.hpp"
#include "wickwz/numerics.hpp"
#include "wickwz/rng.hpp"

namespace wickwz {

double dhx_closed(const PathSample& ps, const ModelSpec& spec, const Direction& h, double t) {
  const PartitionPtr& p = ps.partition();
  spec.validate(*p);
  if (!spec.sigma_is_unit())
    raise(Errc::sigma_unsupported, "dhx_closed is stated for sigma identically 1");
  if (t < spec.s - kTimeTol || t > p->horizon() + kTimeTol)
    raise(Errc::out_of_range, "dhx_closed: t outside [s, T]");

  const double coeff = spec.init.directional_coefficient(h);
  if (coeff == 0.0)
    raise(Errc::degenerate_init, "D_h Y vanishes identically for this initial condition");

  const KernelSlice kappa_t = KernelSlice::plain(p, spec.s, t);
  const PathSample shifted = ps.shifted(kappa_t.step(), -1.0);
  const double dhy_shifted = coeff * spec.init.value(shifted);

  double exponent = 0.0;
  if (!spec.drift.is_zero() && t > spec.s + kTimeTol) {
    // T_{-K_{s,t}} T_{K_{s,r}} X_r = Z_r(omega - int K_{s,t})
    //   * exp{ W_r + |K_{s,r}|^2/2 - <K_{s,r}, K_{s,t}> },
    // so a single reduced solve on the shifted path serves every quadrature
    // node. Composite Simpson over fine cells, half-step dense output.
    const DenseZ dense = solve_z_dense(shifted, spec, t, 2);
    const KappaChart chart(ps, spec.sigma_for(*p), spec.s);
    const auto argument = [&](std::size_t node_idx) {
      const double r = dense.times[node_idx];
      const double e = chart.wiener(r) + 0.5 * chart.norm_sq(r) - chart.cross(r, t);
      return dense.z[node_idx] * std::exp(e);
    };
    const std::size_t cells = (dense.times.size() - 1) / 2;
    for (std::size_t c = 0; c < cells; ++c) {
      const double r0 = dense.times[2 * c];
      const double r1 = dense.times[2 * c + 2];
      const double f0 = spec.drift.bx(r0, argument(2 * c));
      const double fm = spec.drift.bx(dense.times[2 * c + 1], argument(2 * c + 1));
      const double f1 = spec.drift.bx(r1, argument(2 * c + 2));
      exponent += (r1 - r0) / 6.0 * (f0 + 4.0 * fm + f1);
    }
  }

  return dhy_shifted * std::exp(exponent) * std::exp(stoch_exp(ps, kappa_t).exponent);
}

namespace {

double central_difference(const PathSample& ps, const ModelSpec& spec, const Direction& h,
                          double t, double eps) {
  const double x_plus = reconstruct_x(ps.shifted(h.step(), eps), spec, t);
  const double x_minus = reconstruct_x(ps.shifted(h.step(), -eps), spec, t);
  return (x_plus - x_minus) / (2.0 * eps);
}

}  // namespace

double dhx_fd(const PathSample& ps, const ModelSpec& spec, const Direction& h, double t,
              double eps, double* error_estimate) {
  if (!(eps > 0.0)) raise(Errc::bad_step, "dhx_fd needs eps > 0");
  const double v = central_difference(ps, spec, h, t, eps);
  if (error_estimate) {
    // Halve once; for a second-order scheme the error of v is about
    // (4/3) |v - v_half|.
    const double v_half = central_difference(ps, spec, h, t, 0.5 * eps);
    *error_estimate = 4.0 / 3.0 * std::fabs(v - v_half);
  }
  return v;
}

double deta_x_along(const PathSample& ps, const ModelSpec& spec, const Direction& eta, double r,
                    double eps) {
  if (!(eps > 0.0)) raise(Errc::bad_step, "deta_x needs eps > 0");
  if (r < spec.s - kTimeTol || r >= ps.partition()->horizon() - kTimeTol)
    raise(Errc::out_of_range, "deta_x: r outside [s, T)");
  return central_difference(ps, spec, eta, r, eps);
}

double deta_x(const PathSample& ps, const ModelSpec& spec, double r, double eps) {
  if (!(eps > 0.0)) raise(Errc::bad_step, "deta_x needs eps > 0");
  return deta_x_along(ps, spec, deriv_kernel_direction(ps.partition(), r), r, eps);
}

InverseMomentReport inverse_moment(const EnsembleRun& run, double t, double q, double trim) {
  if (run.dhx.empty()) raise(Errc::no_derivatives, "run has no recorded derivatives");
  if (q < 0.0) raise(Errc::out_of_range, "q must be >= 0");
  if (trim < 0.0 || trim >= 0.5) raise(Errc::out_of_range, "trim must be in [0, 0.5)");
  std::size_t col = run.grid.size();
  for (std::size_t j = 0; j < run.grid.size(); ++j)
    if (std::fabs(run.grid[j] - t) <= kTimeTol) {
      col = j;
      break;
    }
  if (col == run.grid.size()) raise(Errc::out_of_range, "t is not an output grid time");

  const std::size_t g = run.grid.size();
  std::vector<double> values(run.n_paths);
  double min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < run.n_paths; ++i) {
    const double d = std::fabs(run.dhx[i * g + col]);
    min_abs = std::min(min_abs, d);
    values[i] = (q == 0.0) ? 1.0 : std::pow(d, -q);
  }

  InverseMomentReport report;
  report.q = q;
  report.trim = trim;
  report.n_samples = run.n_paths;
  report.min_abs_derivative = min_abs;
  report.nondegenerate = min_abs > 0.0;
  report.bootstrap_seed = derive_seed(run.master_seed, 0xb00757ULL);
  report.estimate = trimmed_mean(values, trim);
  if (run.n_paths >= 2) {
    const BootstrapResult boot = bootstrap_mean(values, 200, report.bootstrap_seed, trim);
    report.se = boot.se;
    report.ci_lo = boot.ci_lo;
    report.ci_hi = boot.ci_hi;
  }
  return report;
}

DxResidualReport dx_equation_residual(const PathSample& ps, const ModelSpec& spec,
                                      const Direction& eta, const std::vector<double>& grid,
                                      double eps) {
  if (!(eps > 0.0)) raise(Errc::bad_step, "dx_equation_residual needs eps > 0");
  if (grid.empty()) raise(Errc::insufficient_data, "dx_equation_residual needs grid times");
  const PartitionPtr& p = ps.partition();
  spec.validate(*p);
  for (double t : grid)
    if (t < spec.s - kTimeTol || t > p->horizon() + kTimeTol)
      raise(Errc::out_of_range, "dx_equation_residual: grid time outside [s, T]");

  const double t_max = *std::max_element(grid.begin(), grid.end());
  const std::size_t start = ps.node_index(spec.s);
  const std::size_t stop = ps.node_index(t_max);

  // The integrand jumps at breakpoints (the slope of B^pi and eta'_r are
  // right-open step functions of r), so each subinterval is integrated with
  // its own one-sided values; only X_r and D_eta X_r carry across.
  std::vector<double> x_r(stop - start + 1), deta_r(stop - start + 1);
  for (std::size_t i = start; i <= stop; ++i) {
    const double r = ps.node_time(i);
    x_r[i - start] = reconstruct_x(ps, spec, r);
    deta_r[i - start] = central_difference(ps, spec, eta, r, eps);
  }

  std::vector<double> prefix(stop - start + 1, 0.0);
  const std::size_t m = static_cast<std::size_t>(ps.sub_steps());
  std::size_t seg_begin = start;
  while (seg_begin < stop) {
    const std::size_t k = seg_begin / m;
    const std::size_t seg_end = std::min(stop, (k + 1) * m);
    const Direction eta_prime = deriv_kernel_direction(p, p->left(k));
    const double slope_k =
        (ps.partition_value(k + 1) - ps.partition_value(k)) / p->length(k);
    const double mean_k = eta.interval_mean(k);

    std::vector<double> f(seg_end - seg_begin + 1);
    for (std::size_t node = seg_begin; node <= seg_end; ++node) {
      const double r = ps.node_time(node);
      const double d_plus =
          central_difference(ps.shifted(eta_prime.step(), eps), spec, eta, r, eps);
      const double d_minus =
          central_difference(ps.shifted(eta_prime.step(), -eps), spec, eta, r, eps);
      const double nested = (d_plus - d_minus) / (2.0 * eps);
      const double x = x_r[node - start];
      const double d = deta_r[node - start];
      f[node - seg_begin] = spec.drift.bx(r, x) * d + d * slope_k - nested + x * mean_k;
    }
    // Composite Simpson over node pairs (trapezoid closes odd offsets so the
    // prefix exists at every fine node).
    for (std::size_t node = seg_begin; node < seg_end; ++node) {
      const double h = ps.node_time(node + 1) - ps.node_time(node);
      prefix[node + 1 - start] =
          prefix[node - start] + 0.5 * h * (f[node - seg_begin] + f[node + 1 - seg_begin]);
      if ((node - seg_begin) % 2 == 0 && node + 2 <= seg_end) {
        const double h2 = ps.node_time(node + 2) - ps.node_time(node);
        prefix[node + 2 - start] =
            prefix[node - start] + h2 / 6.0 *
                                       (f[node - seg_begin] + 4.0 * f[node + 1 - seg_begin] +
                                        f[node + 2 - seg_begin]);
        ++node;
      }
    }
    seg_begin = seg_end;
  }

  const double deta_y = (spec.init.value(ps.shifted(eta.step(), eps)) -
                         spec.init.value(ps.shifted(eta.step(), -eps))) /
                        (2.0 * eps);

  DxResidualReport report;
  for (double t : grid) {
    const std::size_t idx = ps.node_index(t) - start;
    DxResidualRow row;
    row.t = t;
    row.lhs = central_difference(ps, spec, eta, t, eps);
    row.rhs = deta_y + prefix[idx];
    row.residual = row.lhs - row.rhs;
    report.rows.push_back(row);
    report.max_abs_residual = std::max(report.max_abs_residual, std::fabs(row.residual));
  }
  return report;
}

void write_derivatives_csv(std::ostream& os, std::span<const std::size_t> path_ids,
                           std::span<const DerivativeSample> samples) {
  if (path_ids.size() != samples.size())
    raise(Errc::dimension_mismatch, "write_derivatives_csv: size mismatch");
  os << "path_id,t,dhx_closed,dhx_fd,eps\n";
  char buf[160];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", path_ids[i], samples[i].t,
                  samples[i].closed_form, samples[i].fd_value, samples[i].eps);
    os << buf;
  }
}

}  // namespace wickwz
