#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wickwz/model.hpp"
#include "wickwz/paths.hpp"
#include "wickwz/solver.hpp"

namespace wickwz {

struct DerivativeSample {
  double t = 0.0;
  double closed_form = 0.0;
  double fd_value = 0.0;
  double eps = 0.0;
  double fd_error_estimate = 0.0;
};

/// Closed-form directional Malliavin derivative along an admissible
/// direction h with D_h Y != 0:
///   D_h X_t = (T_{-K_{s,t}} D_h Y)
///             * exp{ integral_s^t b_x(r, T_{-K_{s,t}} T_{K_{s,r}} X_r) dr }
///             * E(K_{s,t}).
/// The doubly shifted argument is the reduced solution on the path shifted
/// by -K_{s,t} times a translated stochastic exponential, so one extra
/// Z-solve covers the whole time integral. Stated for sigma identically 1;
/// other weights raise SigmaUnsupported rather than guessing.
double dhx_closed(const PathSample& ps, const ModelSpec& spec, const Direction& h, double t);

/// Central-difference shift derivative, each term a full shifted-path solve:
///   (X_t(omega + eps * int h) - X_t(omega - eps * int h)) / (2 eps).
/// Defined for any direction, admissible or not. With error_estimate set the
/// step is halved once and the Richardson discrepancy reported.
double dhx_fd(const PathSample& ps, const ModelSpec& spec, const Direction& h, double t,
              double eps, double* error_estimate = nullptr);

/// D_{eta_r} X_r along eta_r = d/dr K_r(.), the quantity inside the
/// Fokker-Planck diffusion coefficient.
double deta_x(const PathSample& ps, const ModelSpec& spec, double r, double eps);

/// Same with a pre-built direction (ensemble loops reuse one per r).
double deta_x_along(const PathSample& ps, const ModelSpec& spec, const Direction& eta, double r,
                    double eps);

struct InverseMomentReport {
  double q = 0.0;
  double trim = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double min_abs_derivative = 0.0;
  bool nondegenerate = false;
  std::size_t n_samples = 0;
  uint64_t bootstrap_seed = 0;
};

/// Trimmed Monte Carlo estimate of E[ |D_h X_t|^{-q} ] from the recorded
/// closed-form derivatives, with a bootstrap interval. trim drops the given
/// fraction of the largest |D|^{-q} values (the estimator is heavy-tailed);
/// trim = 0 is the plain mean. Also reports min |D_h X_t| as the
/// nondegeneracy witness.
InverseMomentReport inverse_moment(const EnsembleRun& run, double t, double q, double trim);

struct DxResidualRow {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

struct DxResidualReport {
  std::vector<DxResidualRow> rows;
  double max_abs_residual = 0.0;
};

/// Checks the derivative equation paired against a direction eta:
///   D_eta X_t = D_eta Y + int b_x(r, X_r) D_eta X_r dr
///             + int (D_eta X_r) wick dB_r^pi/dr dr + int X_r <d/dr K_r, eta> dr,
/// with the Wick term expanded as D_eta X_r * dB^pi/dr - D_{eta'_r} D_eta X_r
/// and every derivative taken by (nested) central differences. Returns the
/// per-time residual profile; quadrature is trapezoidal over fine cells.
DxResidualReport dx_equation_residual(const PathSample& ps, const ModelSpec& spec,
                                      const Direction& eta, const std::vector<double>& grid,
                                      double eps);

/// CSV columns: path_id, t, dhx_closed, dhx_fd, eps.
void write_derivatives_csv(std::ostream& os, std::span<const std::size_t> path_ids,
                           std::span<const DerivativeSample> samples);

}  // namespace wickwz
