#include "wickwz/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wickwz/errors.hpp"

namespace wickwz {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
  for (std::size_t k = 0; k + 1 < points_.size(); ++k)
    mesh_ = std::max(mesh_, points_[k + 1] - points_[k]);
}

Partition Partition::make(std::vector<double> points) {
  if (points.size() < 2) raise(Errc::too_few_points, "partition needs at least 2 breakpoints");
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (!(points[k] < points[k + 1]))
      raise(Errc::not_sorted, "breakpoints must be strictly increasing");
  }
  if (points.front() != 0.0)
    raise(Errc::wrong_endpoints, "first breakpoint must be 0");
  if (!(points.back() > points.front()))
    raise(Errc::wrong_endpoints, "horizon must exceed the start time");
  return Partition(std::move(points));
}

std::size_t Partition::locate(double t) const {
  const double T = horizon();
  if (t < -kTimeTol || t > T + kTimeTol)
    raise(Errc::out_of_range, "time " + std::to_string(t) + " outside [0, T]");
  if (t >= T - kTimeTol) return n() - 1;
  auto it = std::upper_bound(points_.begin(), points_.end(), t);
  std::size_t k = (it == points_.begin()) ? 0 : static_cast<std::size_t>(it - points_.begin()) - 1;
  if (k >= n()) k = n() - 1;
  // Snap times within tolerance of the next breakpoint into its interval.
  if (k + 1 < n() && t >= points_[k + 1] - kTimeTol) ++k;
  return k;
}

bool Partition::is_breakpoint(double t) const {
  for (double p : points_)
    if (std::fabs(t - p) <= kTimeTol) return true;
  return false;
}

bool Partition::same_as(const Partition& other) const {
  return this == &other || points_ == other.points_;
}

PartitionPtr make_partition(std::vector<double> points) {
  return std::make_shared<const Partition>(Partition::make(std::move(points)));
}

PartitionPtr make_uniform_partition(std::size_t n, double horizon) {
  if (n < 1) raise(Errc::too_few_points, "uniform partition needs n >= 1");
  if (!(horizon > 0.0)) raise(Errc::wrong_endpoints, "horizon must be positive");
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    pts[k] = horizon * static_cast<double>(k) / static_cast<double>(n);
  pts[0] = 0.0;
  pts[n] = horizon;
  return make_partition(std::move(pts));
}

double kernel_value(const Partition& p, double t, double u) {
  const double T = p.horizon();
  if (t < -kTimeTol || t > T + kTimeTol) raise(Errc::out_of_range, "kernel_value: t outside [0, T]");
  const std::size_t k = p.locate(u);
  return clamp01((t - p.left(k)) / p.length(k));
}

double kernel_dt(const Partition& p, double t, double u) {
  const double T = p.horizon();
  if (t < -kTimeTol || t >= T - kTimeTol) raise(Errc::out_of_range, "kernel_dt: t outside [0, T)");
  const std::size_t kt = p.locate(t);
  const std::size_t ku = p.locate(u);
  return (kt == ku) ? 1.0 / p.length(kt) : 0.0;
}

StepFunction::StepFunction(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (breaks_.size() != values_.size() + 1 || values_.empty())
    raise(Errc::dimension_mismatch, "step function needs cells+1 breakpoints");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
    if (!(breaks_[i] < breaks_[i + 1]))
      raise(Errc::not_sorted, "step function breakpoints must increase");
  prefix_.resize(breaks_.size());
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double len = breaks_[i + 1] - breaks_[i];
    prefix_[i + 1] = prefix_[i] + values_[i] * len;
    norm_sq_ += values_[i] * values_[i] * len;
  }
}

double StepFunction::value(double u) const {
  if (u < breaks_.front() - kTimeTol || u > breaks_.back() + kTimeTol)
    raise(Errc::out_of_range, "step function evaluated outside its domain");
  if (u >= breaks_.back() - kTimeTol) return values_.back();
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), u);
  std::size_t i = (it == breaks_.begin()) ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
  if (i >= values_.size()) i = values_.size() - 1;
  if (i + 1 < values_.size() && u >= breaks_[i + 1] - kTimeTol) ++i;
  return values_[i];
}

double StepFunction::integral_to(double t) const {
  if (t <= breaks_.front()) return 0.0;
  if (t >= breaks_.back()) return prefix_.back();
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return prefix_[i] + values_[i] * (t - breaks_[i]);
}

double StepFunction::inner(const StepFunction& other) const {
  // Merge walk over both breakpoint sequences; exact for step functions.
  std::size_t ia = 0, ib = 0;
  double pos = std::min(breaks_.front(), other.breaks_.front());
  const double end = std::max(breaks_.back(), other.breaks_.back());
  double acc = 0.0;
  while (pos < end) {
    const double next_a = (ia + 1 < breaks_.size()) ? breaks_[ia + 1] : end;
    const double next_b = (ib + 1 < other.breaks_.size()) ? other.breaks_[ib + 1] : end;
    const double next = std::min(end, std::min(next_a, next_b));
    const double va = (ia < values_.size() && pos >= breaks_[ia]) ? values_[ia] : 0.0;
    const double vb = (ib < other.values_.size() && pos >= other.breaks_[ib]) ? other.values_[ib] : 0.0;
    acc += va * vb * (next - pos);
    if (next >= next_a && ia + 1 < breaks_.size()) ++ia;
    if (next >= next_b && ib + 1 < other.breaks_.size()) ++ib;
    pos = next;
  }
  return acc;
}

KernelSlice::KernelSlice(PartitionPtr p, double s, double t, std::vector<double> sigma)
    : partition_(std::move(p)), s_(s), t_(t) {
  if (!partition_) raise(Errc::partition_mismatch, "kernel slice needs a partition");
  const Partition& part = *partition_;
  const double T = part.horizon();
  if (s < -kTimeTol || t > T + kTimeTol || s > t + kTimeTol)
    raise(Errc::out_of_range, "kernel slice requires 0 <= s <= t <= T");
  if (sigma.size() != part.n())
    raise(Errc::dimension_mismatch, "sigma needs one weight per subinterval");
  coeffs_.resize(part.n());
  norm_sq_ = 0.0;
  for (std::size_t k = 0; k < part.n(); ++k) {
    const double lo = std::max(s_, part.left(k));
    const double hi = std::min(t_, part.right(k));
    const double overlap = std::max(0.0, hi - lo);
    coeffs_[k] = sigma[k] * overlap / part.length(k);
    norm_sq_ += coeffs_[k] * coeffs_[k] * part.length(k);
  }
  step_ = std::make_shared<const StepFunction>(part.points(), coeffs_);
}

KernelSlice KernelSlice::plain(PartitionPtr p, double s, double t) {
  std::vector<double> unit(p->n(), 1.0);
  return KernelSlice(std::move(p), s, t, std::move(unit));
}

double KernelSlice::value(double u) const { return coeffs_[partition_->locate(u)]; }

bool KernelSlice::is_zero() const {
  for (double c : coeffs_)
    if (c != 0.0) return false;
  return true;
}

KernelSlice KernelSlice::negated() const {
  KernelSlice out = *this;
  std::vector<double> neg = coeffs_;
  for (double& c : neg) c = -c;
  out.coeffs_ = neg;
  out.step_ = std::make_shared<const StepFunction>(partition_->points(), out.coeffs_);
  return out;
}

KernelSlice weighted_kernel(PartitionPtr p, double s, double t, std::vector<double> sigma) {
  return KernelSlice(std::move(p), s, t, std::move(sigma));
}

double inner_product(const KernelSlice& a, const KernelSlice& b) {
  if (!a.partition()->same_as(*b.partition()))
    raise(Errc::partition_mismatch, "inner_product: slices on different partitions");
  const Partition& p = *a.partition();
  double acc = 0.0;
  for (std::size_t k = 0; k < p.n(); ++k)
    acc += a.coefficient(k) * b.coefficient(k) * p.length(k);
  return acc;
}

Direction::Direction(PartitionPtr p, std::size_t cells, std::shared_ptr<const StepFunction> f)
    : partition_(std::move(p)), cells_per_subinterval_(cells), step_(std::move(f)) {
  if (!(step_->norm_sq() > 0.0))
    raise(Errc::config_error, "direction must be nonzero almost everywhere");
  double worst = 0.0;
  for (std::size_t k = 0; k < partition_->n(); ++k)
    worst = std::max(worst, std::fabs(interval_mean(k)));
  admissible_ = worst <= kTimeTol;
}

Direction Direction::from_cell_values(PartitionPtr p, std::size_t cells_per_subinterval,
                                      std::vector<double> values) {
  if (cells_per_subinterval < 1) raise(Errc::bad_resolution, "need at least one cell per subinterval");
  const Partition& part = *p;
  if (values.size() != part.n() * cells_per_subinterval)
    raise(Errc::dimension_mismatch, "direction needs n * cells_per_subinterval values");
  std::vector<double> breaks;
  breaks.reserve(values.size() + 1);
  for (std::size_t k = 0; k < part.n(); ++k) {
    const double lo = part.left(k);
    const double len = part.length(k);
    for (std::size_t c = 0; c < cells_per_subinterval; ++c)
      breaks.push_back(lo + len * static_cast<double>(c) / static_cast<double>(cells_per_subinterval));
  }
  breaks.push_back(part.horizon());
  auto f = std::make_shared<const StepFunction>(std::move(breaks), std::move(values));
  return Direction(std::move(p), cells_per_subinterval, std::move(f));
}

double Direction::interval_mean(std::size_t k) const {
  const Partition& p = *partition_;
  const double lo = p.left(k), hi = p.right(k);
  return (step_->integral_to(hi) - step_->integral_to(lo)) / p.length(k);
}

Direction make_haar_direction(PartitionPtr p) {
  const std::size_t n = p->n();
  std::vector<double> values(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    values[2 * k] = 1.0;
    values[2 * k + 1] = -1.0;
  }
  return Direction::from_cell_values(std::move(p), 2, std::move(values));
}

Direction deriv_kernel_direction(PartitionPtr p, double r) {
  const double T = p->horizon();
  if (r < -kTimeTol || r >= T - kTimeTol)
    raise(Errc::out_of_range, "deriv_kernel_direction: r outside [0, T)");
  const std::size_t k = p->locate(r);
  std::vector<double> values(p->n(), 0.0);
  values[k] = 1.0 / p->length(k);
  return Direction::from_cell_values(std::move(p), 1, std::move(values));
}

Direction indicator_direction(PartitionPtr p, double s) {
  if (!p->is_breakpoint(s))
    raise(Errc::out_of_range, "indicator_direction: s must be a breakpoint");
  if (!(s > kTimeTol))
    raise(Errc::config_error, "indicator_direction: s must be positive (the indicator is zero otherwise)");
  std::vector<double> values(p->n(), 0.0);
  for (std::size_t k = 0; k < p->n(); ++k)
    if (p->right(k) <= s + kTimeTol) values[k] = 1.0;
  return Direction::from_cell_values(std::move(p), 1, std::move(values));
}

double inner(const Direction& h, const KernelSlice& k) { return h.step()->inner(*k.step()); }

double inner(const Direction& a, const Direction& b) { return a.step()->inner(*b.step()); }

AdmissibilityReport check_direction(const Partition& p, const Direction& h,
                                    std::size_t r_grid_points) {
  AdmissibilityReport report;
  report.interval_means.resize(p.n());
  double worst = 0.0;
  for (std::size_t k = 0; k < p.n(); ++k) {
    report.interval_means[k] = h.interval_mean(k);
    if (std::fabs(report.interval_means[k]) > worst) {
      worst = std::fabs(report.interval_means[k]);
      report.worst_interval = k;
    }
  }
  report.admissible = worst <= kTimeTol;
  // <d/dr K_r, h> = interval mean of h on the subinterval containing r; the
  // dense grid evaluation mirrors how the residual is defined.
  const double T = p.horizon();
  for (std::size_t i = 0; i < r_grid_points; ++i) {
    const double r = T * (static_cast<double>(i) + 0.5) / static_cast<double>(r_grid_points);
    const std::size_t k = p.locate(r);
    report.max_abs_residual = std::max(report.max_abs_residual, std::fabs(report.interval_means[k]));
  }
  return report;
}

}  // namespace wickwz
