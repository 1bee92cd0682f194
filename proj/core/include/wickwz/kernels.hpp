#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace wickwz {

/// Absolute tolerance for locating times in subintervals. A time exactly at a
/// breakpoint belongs to the right-open interval starting there; the horizon
/// maps to the closure of the last interval.
inline constexpr double kTimeTol = 1e-12;

/// Finite partition 0 = t_0 < t_1 < ... < t_n = T of the time interval.
class Partition {
 public:
  static Partition make(std::vector<double> points);

  double horizon() const { return points_.back(); }
  std::size_t n() const { return points_.size() - 1; }
  double mesh() const { return mesh_; }
  const std::vector<double>& points() const { return points_; }

  double left(std::size_t k) const { return points_[k]; }
  double right(std::size_t k) const { return points_[k + 1]; }
  double length(std::size_t k) const { return points_[k + 1] - points_[k]; }

  /// Subinterval index containing t (right-open convention, t = T maps to
  /// the last interval). Throws OutOfRange for t outside [0, T].
  std::size_t locate(double t) const;

  /// True if t is a breakpoint (within kTimeTol).
  bool is_breakpoint(double t) const;

  bool same_as(const Partition& other) const;

 private:
  explicit Partition(std::vector<double> points);
  std::vector<double> points_;
  double mesh_ = 0.0;
};

using PartitionPtr = std::shared_ptr<const Partition>;

PartitionPtr make_partition(std::vector<double> points);
PartitionPtr make_uniform_partition(std::size_t n, double horizon);

/// K_t(u): the polygonal kernel, equal to 1 on fully crossed subintervals,
/// (t - t_k)/(t_{k+1} - t_k) on the subinterval containing t, 0 afterwards.
/// Takes values in [0, 1]; K_T(u) = 1 for u < T and K_0 = 0.
double kernel_value(const Partition& p, double t, double u);

/// d/dt K_t(u) = 1/(t_{k+1} - t_k) on the subinterval containing t, 0 elsewhere.
/// Requires t in [0, T).
double kernel_dt(const Partition& p, double t, double u);

/// Right-open step function on [0, T]. Kernel slices and admissible
/// directions are all of this form, which keeps shift composition and inner
/// products exact (no quadrature anywhere in the library proper).
class StepFunction {
 public:
  StepFunction(std::vector<double> breaks, std::vector<double> values);

  double domain_end() const { return breaks_.back(); }
  std::size_t cells() const { return values_.size(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

  double value(double u) const;

  /// Exact antiderivative: integral of the step function over [0, t].
  double integral_to(double t) const;

  /// Exact L2 inner product with another step function (merge walk over the
  /// union of breakpoints).
  double inner(const StepFunction& other) const;

  double norm_sq() const { return norm_sq_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
  std::vector<double> prefix_;  // integral from 0 to breaks_[i]
  double norm_sq_ = 0.0;
};

/// sigma-weighted kernel increment kappa_{s,t}(u) = sum_k sigma_k *
/// (|[s,t] ∩ I_k| / |I_k|) 1_{I_k}(u). With unit weights this is
/// K_t - K_s, the function whose Wiener integral is the polygonal increment.
class KernelSlice {
 public:
  KernelSlice(PartitionPtr p, double s, double t, std::vector<double> sigma);

  static KernelSlice plain(PartitionPtr p, double s, double t);

  double s() const { return s_; }
  double t() const { return t_; }
  const PartitionPtr& partition() const { return partition_; }

  double value(double u) const;
  double coefficient(std::size_t k) const { return coeffs_[k]; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double norm_sq() const { return norm_sq_; }
  bool is_zero() const;

  const std::shared_ptr<const StepFunction>& step() const { return step_; }

  KernelSlice negated() const;

 private:
  PartitionPtr partition_;
  double s_, t_;
  std::vector<double> coeffs_;
  double norm_sq_;
  std::shared_ptr<const StepFunction> step_;
};

KernelSlice weighted_kernel(PartitionPtr p, double s, double t, std::vector<double> sigma);

/// Exact <a, b> = sum_k a_k b_k |I_k|; requires the same partition.
double inner_product(const KernelSlice& a, const KernelSlice& b);

/// Step-function direction h on [0, T], constant on an equal subdivision of
/// each partition subinterval. Admissible means zero mean on every
/// subinterval, which annihilates <d/dr K_r, h> for all r.
class Direction {
 public:
  static Direction from_cell_values(PartitionPtr p, std::size_t cells_per_subinterval,
                                    std::vector<double> values);

  const PartitionPtr& partition() const { return partition_; }
  std::size_t cells_per_subinterval() const { return cells_per_subinterval_; }
  double norm_sq() const { return step_->norm_sq(); }
  bool admissible() const { return admissible_; }
  const std::shared_ptr<const StepFunction>& step() const { return step_; }

  /// (1/|I_k|) * integral of h over subinterval k.
  double interval_mean(std::size_t k) const;

 private:
  Direction(PartitionPtr p, std::size_t cells, std::shared_ptr<const StepFunction> f);
  PartitionPtr partition_;
  std::size_t cells_per_subinterval_;
  std::shared_ptr<const StepFunction> step_;
  bool admissible_ = false;
};

/// The tested default direction: +1 on the first half and -1 on the second
/// half of every subinterval. Admissible, |h|^2 = T, and orthogonal to every
/// kernel slice.
Direction make_haar_direction(PartitionPtr p);

/// eta_r = d/dr K_r(.), the direction entering the Fokker-Planck coefficient:
/// 1/|I_k| on the subinterval containing r, zero elsewhere. Not admissible.
Direction deriv_kernel_direction(PartitionPtr p, double r);

/// Indicator of [0, s) as a direction; s must be a breakpoint with s > 0.
Direction indicator_direction(PartitionPtr p, double s);

double inner(const Direction& h, const KernelSlice& k);
double inner(const Direction& a, const Direction& b);

struct AdmissibilityReport {
  bool admissible = false;
  double max_abs_residual = 0.0;        // max_r |<d/dr K_r, h>| over the r grid
  std::vector<double> interval_means;   // per-subinterval means of h
  std::size_t worst_interval = 0;       // index with the largest |mean|
};

/// Evaluates |<d/dr K_r, h>| on a dense r grid plus the per-interval means.
AdmissibilityReport check_direction(const Partition& p, const Direction& h,
                                    std::size_t r_grid_points = 10000);

}  // namespace wickwz
