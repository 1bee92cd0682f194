#include "wickwz/gbm.hpp"

#include <algorithm>
#include <cmath>

#include "wickwz/errors.hpp"

namespace wickwz {

GbmConfig make_gbm_config(PartitionPtr p, double x0, double s) {
  if (x0 == 0.0) raise(Errc::config_error, "gbm: x0 must be nonzero");
  if (!p->is_breakpoint(s))
    raise(Errc::out_of_range, "gbm: the restart time s must be a breakpoint");
  GbmConfig cfg;
  cfg.x0 = x0;
  cfg.s = s;
  cfg.partition = std::move(p);
  return cfg;
}

double gbm_wz(const PathSample& ps, const GbmConfig& cfg, double t) {
  const Partition& p = *cfg.partition;
  if (!ps.partition()->same_as(p)) raise(Errc::partition_mismatch, "gbm_wz: partition mismatch");
  if (t < cfg.s - kTimeTol || t > p.horizon() + kTimeTol)
    raise(Errc::out_of_range, "gbm_wz: t outside [s, T]");
  const KernelSlice slice = KernelSlice::plain(cfg.partition, cfg.s, t);
  std::size_t k_s = 0;
  for (std::size_t j = 0; j < p.points().size(); ++j)
    if (std::fabs(p.points()[j] - cfg.s) <= kTimeTol) {
      k_s = j;
      break;
    }
  const double b_s = (cfg.s <= kTimeTol) ? 0.0 : ps.partition_value(k_s);
  const double w = wiener_integral(ps, slice);
  return cfg.x0 * std::exp(b_s + w - 0.5 * (cfg.s + slice.norm_sq()));
}

double gbm_exact(const PathSample& ps, double x0, double t) {
  const Partition& p = *ps.partition();
  if (t < -kTimeTol || t > p.horizon() + kTimeTol)
    raise(Errc::out_of_range, "gbm_exact: t outside [0, T]");
  return x0 * std::exp(ps.value_at_time(t) - 0.5 * t);
}

double xi_pi(const Partition& p, double s, double t) {
  if (!p.is_breakpoint(s)) raise(Errc::out_of_range, "xi: s must be a breakpoint");
  if (t < s - kTimeTol || t >= p.horizon() - kTimeTol)
    raise(Errc::out_of_range, "xi: t outside [s, T)");
  const std::size_t k = p.locate(t);
  // With s a breakpoint, the indicator part never overlaps the active cell,
  // so only the sawtooth remains.
  return (t - p.left(k)) / p.length(k);
}

double xi_interval_average(const Partition& p, double s, std::size_t k) {
  if (!p.is_breakpoint(s)) raise(Errc::out_of_range, "xi: s must be a breakpoint");
  if (k >= p.n()) raise(Errc::out_of_range, "xi: subinterval index out of range");
  if (p.left(k) < s - kTimeTol)
    raise(Errc::out_of_range, "xi: subinterval lies before the restart time");
  // (1/len) * integral of the sawtooth (t - t_k)/len over the subinterval.
  return 0.5;
}

double xi_integral(const Partition& p, double s, double t) {
  if (!p.is_breakpoint(s)) raise(Errc::out_of_range, "xi: s must be a breakpoint");
  if (t < s - kTimeTol || t > p.horizon() + kTimeTol)
    raise(Errc::out_of_range, "xi: t outside [s, T]");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.n(); ++k) {
    if (p.right(k) <= s + kTimeTol) continue;
    if (p.left(k) >= t - kTimeTol) break;
    const double upper = std::min(t, p.right(k));
    const double frac = (upper - p.left(k)) / p.length(k);
    acc += 0.5 * frac * frac * p.length(k);
  }
  return acc;
}

FpCompareReport fp_operator_compare(const Partition& p, double s,
                                    const std::vector<double>& t_grid) {
  FpCompareReport report;
  report.sup_deviation = 0.5;  // xi sweeps [0, 1) on every subinterval
  for (double t : t_grid) {
    FpCompareRow row;
    row.t = t;
    row.xi = xi_pi(p, s, t);
    row.running_avg = (t > s + kTimeTol) ? xi_integral(p, s, t) / (t - s) : row.xi;
    report.sup_deviation_grid = std::max(report.sup_deviation_grid, std::fabs(row.xi - 0.5));
    report.rows.push_back(row);
  }
  for (std::size_t k = 0; k <= p.n(); ++k) {
    const double tk = p.points()[k];
    if (tk <= s + kTimeTol) continue;
    report.breakpoint_running_avgs.push_back(xi_integral(p, s, tk) / (tk - s));
  }
  return report;
}

ModelSpec gbm_model(const GbmConfig& cfg) {
  InitialCondition init =
      (cfg.s <= kTimeTol)
          ? InitialCondition::deterministic(cfg.x0)
          : InitialCondition::lognormal_exp(cfg.x0, indicator_direction(cfg.partition, cfg.s));
  return ModelSpec{Drift::zero(), {}, std::move(init), cfg.s};
}

}  // namespace wickwz
