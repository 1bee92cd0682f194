#pragma once

#include <vector>

#include "wickwz/model.hpp"
#include "wickwz/paths.hpp"

namespace wickwz {

/// The multiplicative-noise example restarted at a breakpoint s:
/// X_t = x0 * E(1_{[0,s)} + K_{s,t}) for t >= s.
struct GbmConfig {
  double x0 = 1.0;
  double s = 0.0;
  PartitionPtr partition;
};

/// Validates x0 != 0 and that s is a breakpoint.
GbmConfig make_gbm_config(PartitionPtr p, double x0, double s);

/// Closed-form Wong-Zakai solution
///   x0 * exp{ B_s + (B^pi_t - B^pi_s) - (s + |K_{s,t}|^2)/2 };
/// with s a breakpoint the indicator and the slice have disjoint supports,
/// so the squared norm splits exactly.
double gbm_wz(const PathSample& ps, const GbmConfig& cfg, double t);

/// Exact multiplicative-noise solution x0 * exp{B_t - t/2} from the
/// fine-grid Brownian value.
double gbm_exact(const PathSample& ps, double x0, double t);

/// xi(t) = integral (1_{[0,s)}(u) + K_{s,t}(u)) d/dt K_t(u) du, the effective
/// diffusion factor of the approximate Fokker-Planck operator. For s a
/// breakpoint this is the sawtooth (t - t_k) / (t_{k+1} - t_k).
double xi_pi(const Partition& p, double s, double t);

/// Time average of xi over subinterval k: exactly one half, the coefficient
/// of the exact equation.
double xi_interval_average(const Partition& p, double s, std::size_t k);

/// Integral of xi over [s, t], closed form.
double xi_integral(const Partition& p, double s, double t);

struct FpCompareRow {
  double t = 0.0;
  double xi = 0.0;
  double running_avg = 0.0;  // (1/(t-s)) integral_s^t xi
};

struct FpCompareReport {
  std::vector<FpCompareRow> rows;
  double sup_deviation = 0.5;       // sup_t |xi(t) - 1/2| via one-sided limits
  double sup_deviation_grid = 0.0;  // max over the supplied grid
  std::vector<double> breakpoint_running_avgs;
};

/// Tabulates xi against the constant 1/2 of the exact operator: sawtooth
/// values, running averages, and the (mesh-independent) sup deviation.
FpCompareReport fp_operator_compare(const Partition& p, double s,
                                    const std::vector<double>& t_grid);

/// The ModelSpec whose solver output reproduces gbm_wz: zero drift, unit
/// sigma, data x0 (s = 0) or x0 * E(1_{[0,s)}) (s > 0).
ModelSpec gbm_model(const GbmConfig& cfg);

}  // namespace wickwz
