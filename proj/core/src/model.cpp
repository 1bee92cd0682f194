#include "wickwz/model.hpp"

#include <cmath>

#include "wickwz/errors.hpp"

namespace wickwz {

Drift Drift::zero() { return Drift(Id::zero, {}); }

Drift Drift::linear(double beta) {
  if (!std::isfinite(beta)) raise(Errc::config_error, "linear drift: beta must be finite");
  return Drift(Id::linear, {beta});
}

Drift Drift::tanh_logistic(double a, double c) {
  if (!std::isfinite(a) || !std::isfinite(c))
    raise(Errc::config_error, "tanh_logistic drift: parameters must be finite");
  return Drift(Id::tanh_logistic, {a, c});
}

Drift Drift::sin_drift(double a, double omega) {
  if (!std::isfinite(a) || !std::isfinite(omega))
    raise(Errc::config_error, "sin_drift: parameters must be finite");
  return Drift(Id::sin_drift, {a, omega});
}

std::string Drift::name() const {
  switch (id_) {
    case Id::zero: return "zero";
    case Id::linear: return "linear";
    case Id::tanh_logistic: return "tanh_logistic";
    case Id::sin_drift: return "sin_drift";
  }
  return "?";
}

double Drift::b(double, double x) const {
  switch (id_) {
    case Id::zero: return 0.0;
    case Id::linear: return params_[0] * x;
    case Id::tanh_logistic: return params_[0] * std::tanh(params_[1] * x);
    case Id::sin_drift: return params_[0] * std::sin(params_[1] * x);
  }
  return 0.0;
}

double Drift::bx(double, double x) const {
  switch (id_) {
    case Id::zero: return 0.0;
    case Id::linear: return params_[0];
    case Id::tanh_logistic: {
      const double th = std::tanh(params_[1] * x);
      return params_[0] * params_[1] * (1.0 - th * th);
    }
    case Id::sin_drift: return params_[0] * params_[1] * std::cos(params_[1] * x);
  }
  return 0.0;
}

double Drift::bxx(double, double x) const {
  switch (id_) {
    case Id::zero: return 0.0;
    case Id::linear: return 0.0;
    case Id::tanh_logistic: {
      const double th = std::tanh(params_[1] * x);
      return -2.0 * params_[0] * params_[1] * params_[1] * th * (1.0 - th * th);
    }
    case Id::sin_drift:
      return -params_[0] * params_[1] * params_[1] * std::sin(params_[1] * x);
  }
  return 0.0;
}

double Drift::lipschitz() const {
  switch (id_) {
    case Id::zero: return 0.0;
    case Id::linear: return std::fabs(params_[0]);
    case Id::tanh_logistic: return std::fabs(params_[0] * params_[1]);
    case Id::sin_drift: return std::fabs(params_[0] * params_[1]);
  }
  return 0.0;
}

double Drift::growth() const {
  switch (id_) {
    case Id::zero: return 0.0;
    case Id::linear: return std::fabs(params_[0]);
    case Id::tanh_logistic: return std::fabs(params_[0]);
    case Id::sin_drift: return std::fabs(params_[0]);
  }
  return 0.0;
}

InitialCondition InitialCondition::deterministic(double x0) {
  if (!std::isfinite(x0)) raise(Errc::config_error, "deterministic init: x0 must be finite");
  return InitialCondition(Kind::deterministic, x0, std::nullopt);
}

InitialCondition InitialCondition::lognormal_exp(double y0, Direction g) {
  if (!std::isfinite(y0) || y0 == 0.0)
    raise(Errc::config_error, "lognormal_exp init: y0 must be finite and nonzero");
  return InitialCondition(Kind::lognormal_exp, y0, std::move(g));
}

double InitialCondition::value(const PathSample& ps) const {
  if (kind_ == Kind::deterministic) return amplitude_;
  return amplitude_ * stoch_exp(ps, *direction_).value;
}

double InitialCondition::directional_coefficient(const Direction& h) const {
  if (kind_ == Kind::deterministic) return 0.0;
  return inner(*direction_, h);
}

std::string InitialCondition::name() const {
  return kind_ == Kind::deterministic ? "deterministic" : "lognormal_exp";
}

bool ModelSpec::sigma_is_unit() const {
  for (double w : sigma)
    if (w != 1.0) return false;
  return true;
}

std::vector<double> ModelSpec::sigma_for(const Partition& p) const {
  if (sigma.empty()) return std::vector<double>(p.n(), 1.0);
  if (sigma.size() != p.n())
    raise(Errc::dimension_mismatch, "sigma needs one weight per subinterval");
  return sigma;
}

KernelSlice ModelSpec::kappa(const PartitionPtr& p, double a, double b) const {
  return KernelSlice(p, a, b, sigma_for(*p));
}

void ModelSpec::validate(const Partition& p) const {
  if (!(s >= 0.0) || s >= p.horizon() - kTimeTol)
    raise(Errc::out_of_range, "model start time s must lie in [0, T)");
  if (!sigma.empty() && sigma.size() != p.n())
    raise(Errc::dimension_mismatch, "sigma needs one weight per subinterval");
  if (init.kind() == InitialCondition::Kind::lognormal_exp &&
      !init.direction()->partition()->same_as(p))
    raise(Errc::partition_mismatch, "initial-condition direction lives on a different partition");
}

}  // namespace wickwz
