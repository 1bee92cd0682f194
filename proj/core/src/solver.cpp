#include "wickwz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <string>

#include <json.hpp>

#include "wickwz/errors.hpp"
#include "wickwz/malliavin.hpp"
#include "wickwz/parallel.hpp"
#include "wickwz/rng.hpp"

namespace wickwz {

double DenseZ::at_time(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t - kTimeTol);
  if (it == times.end() || std::fabs(*it - t) > kTimeTol)
    raise(Errc::grid_misaligned, "time " + std::to_string(t) + " is not an integrator node");
  return z[static_cast<std::size_t>(it - times.begin())];
}

KappaChart::KappaChart(const PathSample& ps, const std::vector<double>& sigma, double s)
    : part_(ps.partition().get()), s_(s), sigma_(sigma) {
  const Partition& p = *part_;
  if (sigma_.size() != p.n()) raise(Errc::dimension_mismatch, "sigma size mismatch");
  const std::size_t n = p.n();
  incr_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = static_cast<std::size_t>(ps.sub_steps());
    double d = ps.base_value_at_node((k + 1) * m) - ps.base_value_at_node(k * m);
    for (const ShiftTerm& sh : ps.shift_record())
      d += sh.eps * (sh.g->integral_to(p.right(k)) - sh.g->integral_to(p.left(k)));
    incr_[k] = d;
  }
  w_at_.assign(n + 1, 0.0);
  v_at_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = rho(k, p.right(k));
    const double c = sigma_[k] * r;
    w_at_[k + 1] = w_at_[k] + c * incr_[k];
    v_at_[k + 1] = v_at_[k] + c * c * p.length(k);
  }
}

double KappaChart::rho(std::size_t k, double t) const {
  const Partition& p = *part_;
  const double lo = std::max(s_, p.left(k));
  const double hi = std::min(t, p.right(k));
  return std::max(0.0, hi - lo) / p.length(k);
}

double KappaChart::wiener(double t) const {
  if (t <= s_) return 0.0;
  const std::size_t k = part_->locate(t);
  return w_at_[k] + sigma_[k] * rho(k, t) * incr_[k];
}

double KappaChart::norm_sq(double t) const {
  if (t <= s_) return 0.0;
  const std::size_t k = part_->locate(t);
  const double c = sigma_[k] * rho(k, t);
  return v_at_[k] + c * c * part_->length(k);
}

double KappaChart::cross(double r, double t) const {
  if (r > t) return cross(t, r);
  if (r <= s_) return 0.0;
  const std::size_t k = part_->locate(r);
  const double cr = sigma_[k] * rho(k, r);
  const double ct = sigma_[k] * rho(k, t);
  return v_at_[k] + cr * ct * part_->length(k);
}

namespace {

struct ZIntegrand {
  const Drift* drift;
  const KappaChart* chart;

  // dZ/dt = b(t, Z * A(t)) / A(t) with A(t) = E(-kappa_{s,t})^{-1}
  //       = exp{ W(t) + |kappa_{s,t}|^2 / 2 }.
  double operator()(double t, double z) const {
    const double e = chart->wiener(t) + 0.5 * chart->norm_sq(t);
    const double a = std::exp(e);
    return drift->b(t, z * a) / a;
  }
};

}  // namespace

DenseZ solve_z_dense(const PathSample& ps, const ModelSpec& spec, double t_end, int substeps) {
  const Partition& p = *ps.partition();
  spec.validate(p);
  if (substeps < 1) raise(Errc::bad_resolution, "substeps must be >= 1");
  const std::size_t start = ps.node_index(spec.s);
  const std::size_t stop = ps.node_index(t_end);
  if (stop < start) raise(Errc::out_of_range, "t_end before the start time");

  DenseZ out;
  out.times.reserve((stop - start) * static_cast<std::size_t>(substeps) + 1);
  out.z.reserve(out.times.capacity());

  double z = spec.init.value(ps);
  out.times.push_back(ps.node_time(start));
  out.z.push_back(z);
  if (stop == start) return out;

  if (spec.drift.is_zero()) {
    // dZ/dt = 0: Z stays at the initial value, no integrator error.
    for (std::size_t i = start; i < stop; ++i) {
      const double t0 = ps.node_time(i);
      const double t1 = ps.node_time(i + 1);
      for (int sub = 1; sub <= substeps; ++sub) {
        out.times.push_back(t0 + (t1 - t0) * static_cast<double>(sub) / substeps);
        out.z.push_back(z);
      }
    }
    out.times.back() = ps.node_time(stop);
    return out;
  }

  const KappaChart chart(ps, spec.sigma_for(p), spec.s);
  const ZIntegrand f{&spec.drift, &chart};
  for (std::size_t i = start; i < stop; ++i) {
    const double t0 = ps.node_time(i);
    const double t1 = ps.node_time(i + 1);
    const double h = (t1 - t0) / static_cast<double>(substeps);
    for (int sub = 0; sub < substeps; ++sub) {
      const double t = t0 + h * sub;
      const double k1 = f(t, z);
      const double k2 = f(t + 0.5 * h, z + 0.5 * h * k1);
      const double k3 = f(t + 0.5 * h, z + 0.5 * h * k2);
      const double k4 = f(t + h, z + h * k3);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(z))
        raise(Errc::non_finite_state,
              "Z became non-finite at t = " + std::to_string(t + h) +
                  " (drift outside the registry contract?)");
      out.times.push_back(sub + 1 == substeps ? t1 : t + h);
      out.z.push_back(z);
    }
  }
  return out;
}

namespace {

void check_grid(const PathSample& ps, const ModelSpec& spec, const std::vector<double>& grid) {
  if (grid.empty()) raise(Errc::insufficient_data, "empty output grid");
  double prev = spec.s - kTimeTol;
  for (double t : grid) {
    if (t < spec.s - kTimeTol || t > ps.partition()->horizon() + kTimeTol)
      raise(Errc::out_of_range, "grid time outside [s, T]");
    if (t <= prev) raise(Errc::grid_misaligned, "output grid must be strictly increasing");
    ps.node_index(t);  // throws GridMisaligned when off the fine grid
    prev = t;
  }
}

}  // namespace

Trajectory solve_z(const PathSample& ps, const ModelSpec& spec, std::vector<double> grid) {
  check_grid(ps, spec, grid);
  const DenseZ dense = solve_z_dense(ps, spec, grid.back());
  Trajectory traj;
  traj.grid = std::move(grid);
  traj.z_values.reserve(traj.grid.size());
  for (double t : traj.grid) traj.z_values.push_back(dense.at_time(t));
  return traj;
}

double reconstruct_x(const PathSample& ps, const ModelSpec& spec, double t) {
  const PartitionPtr& p = ps.partition();
  spec.validate(*p);
  if (t < spec.s - kTimeTol) raise(Errc::out_of_range, "reconstruction time before s");
  const KernelSlice kappa = spec.kappa(p, spec.s, t);
  double z;
  if (spec.drift.is_zero()) {
    z = spec.init.value(ps.shifted(kappa.step(), -1.0));
  } else {
    const PathSample shifted = ps.shifted(kappa.step(), -1.0);
    z = solve_z_dense(shifted, spec, t).z.back();
  }
  return z * std::exp(stoch_exp(ps, kappa).exponent);
}

Trajectory solve_trajectory(const PathSample& ps, const ModelSpec& spec,
                            std::vector<double> grid) {
  Trajectory traj = solve_z(ps, spec, std::move(grid));
  traj.x_values.reserve(traj.grid.size());
  for (double t : traj.grid) traj.x_values.push_back(reconstruct_x(ps, spec, t));
  return traj;
}

std::vector<double> make_output_grid(const Partition& p, int m, double s, std::size_t count) {
  if (count < 2) raise(Errc::insufficient_data, "output grid needs at least 2 times");
  const double T = p.horizon();
  std::vector<double> grid;
  grid.reserve(count);
  const std::size_t total = p.n() * static_cast<std::size_t>(m);
  // Snap equally spaced times in [s, T] to fine-grid nodes, dropping duplicates.
  std::size_t prev_node = 0;
  bool have_prev = false;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = s + (T - s) * static_cast<double>(i) / static_cast<double>(count - 1);
    std::size_t node;
    const std::size_t k = p.locate(std::min(t, T));
    const double frac = (std::min(t, T) - p.left(k)) / p.length(k) * static_cast<double>(m);
    node = k * static_cast<std::size_t>(m) + static_cast<std::size_t>(std::round(frac));
    node = std::min(node, total);
    if (have_prev && node == prev_node) continue;
    const double tk = p.left(node / m) + p.length(std::min(node / m, p.n() - 1)) *
                                             static_cast<double>(node % m) / static_cast<double>(m);
    grid.push_back(node == total ? T : tk);
    prev_node = node;
    have_prev = true;
  }
  return grid;
}

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string canonical_config(const EnsembleRun& run) {
  char buf[64];
  std::string s = "partition:";
  for (double t : run.partition->points()) {
    std::snprintf(buf, sizeof(buf), "%.17g,", t);
    s += buf;
  }
  s += ";m:" + std::to_string(run.m);
  s += ";drift:" + run.model.drift.name();
  for (double prm : run.model.drift.params()) {
    std::snprintf(buf, sizeof(buf), "%.17g,", prm);
    s += buf;
  }
  s += ";sigma:";
  for (double w : run.model.sigma) {
    std::snprintf(buf, sizeof(buf), "%.17g,", w);
    s += buf;
  }
  s += ";init:" + run.model.init.name();
  std::snprintf(buf, sizeof(buf), "%.17g", run.model.init.amplitude());
  s += buf;
  std::snprintf(buf, sizeof(buf), ";s:%.17g", run.model.s);
  s += buf;
  s += ";n_paths:" + std::to_string(run.n_paths);
  s += ";seed:" + std::to_string(run.master_seed);
  s += ";grid:";
  for (double t : run.grid) {
    std::snprintf(buf, sizeof(buf), "%.17g,", t);
    s += buf;
  }
  return s;
}

}  // namespace

std::string config_hash_string(const EnsembleRun& run) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_config(run))));
  return buf;
}

EnsembleRun run_ensemble(PartitionPtr p, int m, const ModelSpec& spec, std::size_t n_paths,
                         uint64_t master_seed, const EnsembleOptions& opt) {
  spec.validate(*p);
  if (n_paths < 1) raise(Errc::insufficient_data, "n_paths must be >= 1");
  if (opt.grid.empty()) raise(Errc::insufficient_data, "ensemble needs an output grid");

  EnsembleRun run{std::move(p), m,        spec, n_paths, master_seed, "",
                  opt.grid,     {},       {},   {},      {},          {},
                  {},           {},       {}};
  {
    // Grid validation against one cheap sample.
    PathSample probe = PathSample::zero_path(run.partition, m);
    check_grid(probe, spec, opt.grid);
    for (double r : opt.deta_r_grid) {
      if (r < spec.s - kTimeTol || r >= run.partition->horizon() - kTimeTol)
        raise(Errc::out_of_range, "deta grid times must lie in [s, T)");
      probe.node_index(r);
    }
  }
  run.config_hash = config_hash_string(run);
  run.seeds.resize(n_paths);
  const std::size_t g = opt.grid.size();
  run.x.assign(n_paths * g, 0.0);
  run.z.assign(n_paths * g, 0.0);
  if (opt.record_bpoly) run.bpoly.assign(n_paths * g, 0.0);
  if (opt.record_dhx) run.dhx.assign(n_paths * g, 0.0);
  run.deta_r = opt.deta_r_grid;
  if (!run.deta_r.empty()) {
    run.deta.assign(n_paths * run.deta_r.size(), 0.0);
    run.x_at_deta.assign(n_paths * run.deta_r.size(), 0.0);
  }

  const Direction haar = make_haar_direction(run.partition);
  std::vector<Direction> etas;
  etas.reserve(run.deta_r.size());
  for (double r : run.deta_r) etas.push_back(deriv_kernel_direction(run.partition, r));

  if (opt.record_dhx) {
    if (!spec.sigma_is_unit())
      raise(Errc::sigma_unsupported, "closed-form derivatives need sigma identically 1");
    if (spec.init.directional_coefficient(haar) == 0.0)
      raise(Errc::degenerate_init, "D_h Y vanishes identically for this initial condition");
  }

  std::mutex err_mutex;
  std::size_t first_bad_path = n_paths;
  std::string first_bad_what;
  Errc first_bad_code = Errc::non_finite_state;

  parallel_for(n_paths, opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_bad_path < i) return;  // an earlier path already failed
      }
      try {
        const uint64_t seed = derive_seed(master_seed, i);
        run.seeds[i] = seed;
        const PathSample ps = PathSample::sample(run.partition, m, seed);
        const Trajectory traj = solve_trajectory(ps, spec, opt.grid);
        for (std::size_t j = 0; j < g; ++j) {
          run.x[i * g + j] = traj.x_values[j];
          run.z[i * g + j] = traj.z_values[j];
          if (opt.record_bpoly) run.bpoly[i * g + j] = polygonal_value(ps, opt.grid[j]);
          if (opt.record_dhx) run.dhx[i * g + j] = dhx_closed(ps, spec, haar, opt.grid[j]);
        }
        for (std::size_t j = 0; j < run.deta_r.size(); ++j) {
          run.deta[i * run.deta_r.size() + j] =
              deta_x_along(ps, spec, etas[j], run.deta_r[j], opt.fd_eps);
          run.x_at_deta[i * run.deta_r.size() + j] = reconstruct_x(ps, spec, run.deta_r[j]);
        }
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < first_bad_path) {
          first_bad_path = i;
          first_bad_what = e.what();
          first_bad_code = e.code();
        }
        return;
      }
    }
  });

  if (first_bad_path < n_paths)
    raise(first_bad_code, "path " + std::to_string(first_bad_path) + ": " + first_bad_what);
  return run;
}

void write_run_json(std::ostream& os, const EnsembleRun& run, const std::string& created_utc) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["config"]["partition"] = run.partition->points();
  j["config"]["m"] = run.m;
  j["config"]["model"]["drift"]["id"] = run.model.drift.name();
  j["config"]["model"]["drift"]["params"] = run.model.drift.params();
  j["config"]["model"]["sigma"] = run.model.sigma;
  j["config"]["model"]["init"]["kind"] = run.model.init.name();
  j["config"]["model"]["init"]["amplitude"] = run.model.init.amplitude();
  j["config"]["model"]["s"] = run.model.s;
  j["config"]["n_paths"] = run.n_paths;
  j["config"]["grid"] = run.grid;
  j["master_seed"] = run.master_seed;
  j["path_seed_rule"] = "splitmix64(splitmix64(master) ^ (index + 0x9e3779b97f4a7c15))";
  j["config_hash"] = run.config_hash;
  j["metadata"]["created_utc"] = created_utc;
  os << j.dump(2) << "\n";
}

void write_trajectories_csv(std::ostream& os, const EnsembleRun& run) {
  os << "path_id,t,Z,X\n";
  char buf[128];
  const std::size_t g = run.grid.size();
  for (std::size_t i = 0; i < run.n_paths; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, run.grid[j],
                    run.z[i * g + j], run.x[i * g + j]);
      os << buf;
    }
  }
}

}  // namespace wickwz
