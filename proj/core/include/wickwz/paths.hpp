#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "wickwz/kernels.hpp"

namespace wickwz {

/// One accumulated Cameron-Martin shift: the path is translated by
/// eps * integral of g. Shifts are kept symbolically so that Wiener
/// integrals on shifted paths compose through exact inner products instead
/// of accumulating interpolation error.
struct ShiftTerm {
  std::shared_ptr<const StepFunction> g;
  double eps = 0.0;
};

/// A Brownian trajectory on the fine grid (m sub-steps per partition
/// subinterval) together with its shift record. Immutable; shifting returns
/// a new sample sharing the base values.
class PathSample {
 public:
  /// Gaussian increments from the counter-based generator, inverse-CDF
  /// transform. Same seed, same path, bit for bit.
  static PathSample sample(PartitionPtr p, int m, uint64_t seed);

  /// Debug/test factory from explicit fine-grid values (values[0] must be 0).
  static PathSample from_fine_values(PartitionPtr p, int m, std::vector<double> values,
                                     uint64_t seed = 0);

  /// The zero path (debug generator).
  static PathSample zero_path(PartitionPtr p, int m);

  const PartitionPtr& partition() const { return partition_; }
  int sub_steps() const { return m_; }
  uint64_t seed() const { return seed_; }
  const std::vector<ShiftTerm>& shift_record() const { return shifts_; }

  std::size_t node_count() const { return base_->size(); }
  double node_time(std::size_t i) const;

  /// Fine-grid node index for an aligned time; throws GridMisaligned otherwise.
  std::size_t node_index(double t) const;

  double base_value_at_node(std::size_t i) const { return (*base_)[i]; }
  double value_at_node(std::size_t i) const;
  double value_at_time(double t) const { return value_at_node(node_index(t)); }

  /// B at breakpoint t_k (shift applied).
  double partition_value(std::size_t k) const;

  PathSample shifted(std::shared_ptr<const StepFunction> g, double eps) const;

 private:
  PathSample(PartitionPtr p, int m, uint64_t seed, std::shared_ptr<const std::vector<double>> base);
  double shift_offset(double t) const;

  PartitionPtr partition_;
  int m_ = 0;
  uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<double>> base_;
  std::vector<ShiftTerm> shifts_;
};

/// Piecewise-linear interpolation of the partition values; B^pi(T) = B(T).
double polygonal_value(const PathSample& ps, double t);

/// (B_{t_{k+1}} - B_{t_k}) / (t_{k+1} - t_k) for t in [t_k, t_{k+1}).
double polygonal_slope(const PathSample& ps, double t);

/// Exact Wiener integral of a step function whose breakpoints sit on the
/// fine grid: telescoped base increments plus inner products against the
/// shift record.
double wiener_integral(const PathSample& ps, const StepFunction& g);
double wiener_integral(const PathSample& ps, const KernelSlice& slice);
double wiener_integral(const PathSample& ps, const Direction& h);

struct StochExpValue {
  double exponent = 0.0;
  double value = 1.0;
};

/// Stochastic exponential of a kernel slice or a direction:
/// exp{ integral g dB - |g|^2 / 2 }; unit mean over the Brownian law.
StochExpValue stoch_exp(const PathSample& ps, const KernelSlice& slice);
StochExpValue stoch_exp(const PathSample& ps, const Direction& g);

PathSample shift_path(const PathSample& ps, const KernelSlice& g, double eps);
PathSample shift_path(const PathSample& ps, const Direction& g, double eps);

/// sup over fine-grid nodes of |B^pi - B| (shift record included).
double sup_polygonal_error(const PathSample& ps);

struct ConvergenceRow {
  std::size_t n = 0;
  double mesh = 0.0;
  double mean_sup_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  // least-squares slope of log(error) vs log(mesh)
};

/// Monte Carlo estimate of E[sup |B^pi - B|] per partition size and the
/// log-log rate against the mesh. Needs at least 3 partition sizes and m >= 2.
ConvergenceReport convergence_report(const std::vector<uint64_t>& seeds,
                                     const std::vector<std::size_t>& n_values, int m,
                                     double horizon = 1.0);

/// CSV columns: t, B, B_poly.
void write_path_csv(std::ostream& os, const PathSample& ps);

}  // namespace wickwz
