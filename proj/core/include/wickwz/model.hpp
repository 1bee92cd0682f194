#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wickwz/kernels.hpp"
#include "wickwz/paths.hpp"

namespace wickwz {

/// Drift registry. Fixed families instead of arbitrary callbacks: every
/// entry has bounded first and second x-derivatives, and supplies them
/// analytically. The solver's hypotheses are structural, not checkable at
/// runtime, so the registry is the contract.
class Drift {
 public:
  enum class Id { zero, linear, tanh_logistic, sin_drift };

  static Drift zero();
  static Drift linear(double beta);
  static Drift tanh_logistic(double a, double c);  // b(t,x) = a * tanh(c x)
  static Drift sin_drift(double a, double omega);  // b(t,x) = a * sin(omega x)

  Id id() const { return id_; }
  bool is_zero() const { return id_ == Id::zero; }
  std::string name() const;
  const std::vector<double>& params() const { return params_; }

  double b(double t, double x) const;
  double bx(double t, double x) const;
  double bxx(double t, double x) const;

  /// Lipschitz bound of b in x.
  double lipschitz() const;
  /// Growth bound: |b(t,x)| <= growth() * (1 + |x|).
  double growth() const;

 private:
  Drift(Id id, std::vector<double> params) : id_(id), params_(std::move(params)) {}
  Id id_;
  std::vector<double> params_;
};

/// Initial data for the random Cauchy problem, evaluated as a functional of
/// the driving path. Two families:
///   deterministic(x0)         Y = x0
///   lognormal_exp(y0, g)      Y = y0 * exp{ integral g dB - |g|^2/2 }
/// The lognormal family has nonzero directional derivatives and finite
/// inverse moments of every order, which is what the density machinery needs.
class InitialCondition {
 public:
  enum class Kind { deterministic, lognormal_exp };

  static InitialCondition deterministic(double x0);
  static InitialCondition lognormal_exp(double y0, Direction g);

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  const std::optional<Direction>& direction() const { return direction_; }

  double value(const PathSample& ps) const;

  /// c with D_h Y = c * Y; zero for deterministic data.
  double directional_coefficient(const Direction& h) const;

  std::string name() const;

 private:
  InitialCondition(Kind kind, double amplitude, std::optional<Direction> g)
      : kind_(kind), amplitude_(amplitude), direction_(std::move(g)) {}
  Kind kind_;
  double amplitude_;
  std::optional<Direction> direction_;
};

/// Everything that defines one Wick equation: drift, per-subinterval
/// diffusion weights (empty means sigma identically 1), initial data and the
/// start time s. s must sit on the fine grid used by the paths.
struct ModelSpec {
  Drift drift;
  std::vector<double> sigma;  // one weight per subinterval; empty = unit
  InitialCondition init;
  double s = 0.0;

  bool sigma_is_unit() const;
  std::vector<double> sigma_for(const Partition& p) const;
  KernelSlice kappa(const PartitionPtr& p, double a, double b) const;
  void validate(const Partition& p) const;
};

}  // namespace wickwz
