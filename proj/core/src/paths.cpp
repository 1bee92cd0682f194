#include "wickwz/paths.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "wickwz/errors.hpp"
#include "wickwz/numerics.hpp"
#include "wickwz/rng.hpp"

namespace wickwz {

PathSample::PathSample(PartitionPtr p, int m, uint64_t seed,
                       std::shared_ptr<const std::vector<double>> base)
    : partition_(std::move(p)), m_(m), seed_(seed), base_(std::move(base)) {}

PathSample PathSample::sample(PartitionPtr p, int m, uint64_t seed) {
  if (m < 1) raise(Errc::bad_resolution, "sub-steps per subinterval must be >= 1");
  const Partition& part = *p;
  auto values = std::make_shared<std::vector<double>>(part.n() * static_cast<std::size_t>(m) + 1);
  CounterRng rng(seed);
  double b = 0.0;
  (*values)[0] = 0.0;
  std::size_t idx = 1;
  for (std::size_t k = 0; k < part.n(); ++k) {
    const double dt = part.length(k) / static_cast<double>(m);
    const double sqrt_dt = std::sqrt(dt);
    for (int i = 0; i < m; ++i) {
      b += sqrt_dt * rng.next_normal();
      (*values)[idx++] = b;
    }
  }
  return PathSample(std::move(p), m, seed, std::move(values));
}

PathSample PathSample::from_fine_values(PartitionPtr p, int m, std::vector<double> values,
                                        uint64_t seed) {
  if (m < 1) raise(Errc::bad_resolution, "sub-steps per subinterval must be >= 1");
  const std::size_t expected = p->n() * static_cast<std::size_t>(m) + 1;
  if (values.size() != expected)
    raise(Errc::dimension_mismatch, "expected " + std::to_string(expected) + " fine-grid values");
  if (values.front() != 0.0) raise(Errc::wrong_endpoints, "a Brownian path starts at 0");
  return PathSample(std::move(p), m, seed,
                    std::make_shared<const std::vector<double>>(std::move(values)));
}

PathSample PathSample::zero_path(PartitionPtr p, int m) {
  const std::size_t count = p->n() * static_cast<std::size_t>(m) + 1;
  return from_fine_values(std::move(p), m, std::vector<double>(count, 0.0));
}

double PathSample::node_time(std::size_t i) const {
  const Partition& p = *partition_;
  const std::size_t m = static_cast<std::size_t>(m_);
  const std::size_t k = std::min(i / m, p.n() - 1);
  const std::size_t j = i - k * m;
  if (j == 0) return p.left(k);
  if (j == m) return p.right(k);
  return p.left(k) + p.length(k) * static_cast<double>(j) / static_cast<double>(m);
}

std::size_t PathSample::node_index(double t) const {
  const Partition& p = *partition_;
  if (t < -kTimeTol || t > p.horizon() + kTimeTol)
    raise(Errc::out_of_range, "time outside [0, T]");
  if (t >= p.horizon() - kTimeTol) return node_count() - 1;
  const std::size_t k = p.locate(t);
  const double frac = (t - p.left(k)) / p.length(k) * static_cast<double>(m_);
  const double rounded = std::round(frac);
  if (std::fabs(frac - rounded) * p.length(k) / static_cast<double>(m_) > kTimeTol)
    raise(Errc::grid_misaligned, "time " + std::to_string(t) + " is not a fine-grid node");
  std::size_t idx = k * static_cast<std::size_t>(m_) + static_cast<std::size_t>(rounded);
  return std::min(idx, node_count() - 1);
}

double PathSample::shift_offset(double t) const {
  double off = 0.0;
  for (const ShiftTerm& s : shifts_) off += s.eps * s.g->integral_to(t);
  return off;
}

double PathSample::value_at_node(std::size_t i) const {
  double v = (*base_)[i];
  if (!shifts_.empty()) v += shift_offset(node_time(i));
  return v;
}

double PathSample::partition_value(std::size_t k) const {
  return value_at_node(k * static_cast<std::size_t>(m_));
}

PathSample PathSample::shifted(std::shared_ptr<const StepFunction> g, double eps) const {
  PathSample out = *this;
  if (eps != 0.0) out.shifts_.push_back(ShiftTerm{std::move(g), eps});
  return out;
}

double polygonal_value(const PathSample& ps, double t) {
  const Partition& p = *ps.partition();
  if (t < -kTimeTol || t > p.horizon() + kTimeTol)
    raise(Errc::out_of_range, "polygonal_value: time outside [0, T]");
  if (t >= p.horizon() - kTimeTol) return ps.partition_value(p.n());
  const std::size_t k = p.locate(t);
  const double w = (t - p.left(k)) / p.length(k);
  return (1.0 - w) * ps.partition_value(k) + w * ps.partition_value(k + 1);
}

double polygonal_slope(const PathSample& ps, double t) {
  const Partition& p = *ps.partition();
  if (t < -kTimeTol || t >= p.horizon() - kTimeTol)
    raise(Errc::out_of_range, "polygonal_slope: time outside [0, T)");
  const std::size_t k = p.locate(t);
  return (ps.partition_value(k + 1) - ps.partition_value(k)) / p.length(k);
}

double wiener_integral(const PathSample& ps, const StepFunction& g) {
  // Base part: sum over cells of g of g_i * (B_next - B_prev); boundaries
  // must be fine-grid nodes so the increments are exact.
  double acc = 0.0;
  const auto& breaks = g.breaks();
  const auto& values = g.values();
  std::size_t prev = ps.node_index(breaks[0]);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t next = ps.node_index(breaks[i + 1]);
    if (values[i] != 0.0)
      acc += values[i] * (ps.base_value_at_node(next) - ps.base_value_at_node(prev));
    prev = next;
  }
  for (const ShiftTerm& s : ps.shift_record()) acc += s.eps * g.inner(*s.g);
  return acc;
}

double wiener_integral(const PathSample& ps, const KernelSlice& slice) {
  if (!slice.partition()->same_as(*ps.partition()))
    raise(Errc::partition_mismatch, "wiener_integral: slice on a different partition");
  return wiener_integral(ps, *slice.step());
}

double wiener_integral(const PathSample& ps, const Direction& h) {
  if (!h.partition()->same_as(*ps.partition()))
    raise(Errc::partition_mismatch, "wiener_integral: direction on a different partition");
  if (static_cast<std::size_t>(ps.sub_steps()) % h.cells_per_subinterval() != 0)
    raise(Errc::grid_misaligned,
          "direction cells must align with the fine grid (m divisible by cells_per_subinterval)");
  return wiener_integral(ps, *h.step());
}

StochExpValue stoch_exp(const PathSample& ps, const KernelSlice& slice) {
  StochExpValue out;
  out.exponent = wiener_integral(ps, slice) - 0.5 * slice.norm_sq();
  out.value = std::exp(out.exponent);
  return out;
}

StochExpValue stoch_exp(const PathSample& ps, const Direction& g) {
  StochExpValue out;
  out.exponent = wiener_integral(ps, g) - 0.5 * g.norm_sq();
  out.value = std::exp(out.exponent);
  return out;
}

PathSample shift_path(const PathSample& ps, const KernelSlice& g, double eps) {
  if (!g.partition()->same_as(*ps.partition()))
    raise(Errc::partition_mismatch, "shift_path: slice on a different partition");
  return ps.shifted(g.step(), eps);
}

PathSample shift_path(const PathSample& ps, const Direction& g, double eps) {
  if (!g.partition()->same_as(*ps.partition()))
    raise(Errc::partition_mismatch, "shift_path: direction on a different partition");
  return ps.shifted(g.step(), eps);
}

double sup_polygonal_error(const PathSample& ps) {
  const Partition& p = *ps.partition();
  const std::size_t m = static_cast<std::size_t>(ps.sub_steps());
  double sup = 0.0;
  for (std::size_t k = 0; k < p.n(); ++k) {
    const double b0 = ps.value_at_node(k * m);
    const double b1 = ps.value_at_node((k + 1) * m);
    for (std::size_t j = 1; j < m; ++j) {
      const double w = static_cast<double>(j) / static_cast<double>(m);
      const double poly = (1.0 - w) * b0 + w * b1;
      sup = std::max(sup, std::fabs(poly - ps.value_at_node(k * m + j)));
    }
  }
  return sup;
}

ConvergenceReport convergence_report(const std::vector<uint64_t>& seeds,
                                     const std::vector<std::size_t>& n_values, int m,
                                     double horizon) {
  if (n_values.size() < 3)
    raise(Errc::insufficient_data, "convergence report needs at least 3 partition sizes");
  if (seeds.empty()) raise(Errc::insufficient_data, "convergence report needs seeds");
  if (m < 2) raise(Errc::bad_resolution, "sup-error estimation needs m >= 2");
  ConvergenceReport report;
  std::vector<double> log_mesh, log_err;
  std::vector<double> sups(seeds.size());
  for (std::size_t n : n_values) {
    PartitionPtr p = make_uniform_partition(n, horizon);
    for (std::size_t i = 0; i < seeds.size(); ++i)
      sups[i] = sup_polygonal_error(PathSample::sample(p, m, seeds[i]));
    ConvergenceRow row;
    row.n = n;
    row.mesh = p->mesh();
    row.mean_sup_error = pairwise_mean(sups);
    report.rows.push_back(row);
    log_mesh.push_back(std::log(row.mesh));
    log_err.push_back(std::log(row.mean_sup_error));
  }
  report.slope = least_squares(log_mesh, log_err).slope;
  return report;
}

void write_path_csv(std::ostream& os, const PathSample& ps) {
  os << "t,B,B_poly\n";
  char buf[96];
  for (std::size_t i = 0; i < ps.node_count(); ++i) {
    const double t = ps.node_time(i);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, ps.value_at_node(i),
                  polygonal_value(ps, t));
    os << buf;
  }
}

}  // namespace wickwz
