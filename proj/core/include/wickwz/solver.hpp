#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wickwz/model.hpp"
#include "wickwz/paths.hpp"

namespace wickwz {

struct Trajectory {
  std::vector<double> grid;
  std::vector<double> z_values;
  std::vector<double> x_values;
};

/// Z on every integrator node in [s, t_end]; times are fine-grid nodes
/// (optionally split into substeps).
struct DenseZ {
  std::vector<double> times;
  std::vector<double> z;
  double at_time(double t) const;
};

/// Exact closed forms for the integral of kappa_{s,.} against the path and
/// its squared norm, as functions of the upper endpoint. O(1) per
/// evaluation, shift record folded in through inner products.
class KappaChart {
 public:
  KappaChart(const PathSample& ps, const std::vector<double>& sigma, double s);

  double wiener(double t) const;    // integral of kappa_{s,t} dB
  double norm_sq(double t) const;   // |kappa_{s,t}|^2
  double cross(double r, double t) const;  // <kappa_{s,r}, kappa_{s,t}>, r <= t

 private:
  const Partition* part_;
  double s_;
  std::vector<double> sigma_;
  std::vector<double> incr_;   // per-interval sigma-free effective increments
  std::vector<double> w_at_;   // cumulative W at breakpoints (clamped at s)
  std::vector<double> v_at_;   // cumulative |kappa|^2 at breakpoints
  double rho(std::size_t k, double t) const;
};

/// Pathwise solution of the reduced equation
///   Z_t = Y + integral_s^t b(r, Z_r * E(-kappa_{s,r})^{-1}) * E(-kappa_{s,r}) dr
/// by classical RK4 with fixed step equal to the fine-grid cell (optionally
/// halved). Breakpoints are always step nodes, so the integrand is smooth on
/// every step and the scheme keeps its order.
DenseZ solve_z_dense(const PathSample& ps, const ModelSpec& spec, double t_end, int substeps = 1);

/// Z on the requested grid (fine-aligned, increasing, inside [s, T]).
Trajectory solve_z(const PathSample& ps, const ModelSpec& spec, std::vector<double> grid);

/// X_t = (Z_t evaluated on the path shifted by -kappa_{s,t}) * E(kappa_{s,t}),
/// re-solving the reduced equation on the shifted path for each t.
double reconstruct_x(const PathSample& ps, const ModelSpec& spec, double t);

/// Z and X on the grid.
Trajectory solve_trajectory(const PathSample& ps, const ModelSpec& spec, std::vector<double> grid);

struct EnsembleOptions {
  std::vector<double> grid;
  bool record_bpoly = false;
  bool record_dhx = false;            // closed-form D_h X along the Haar direction
  std::vector<double> deta_r_grid;    // if nonempty, D_{eta_r} X_r by central differences
  double fd_eps = 1e-3;
  int threads = 0;
};

struct EnsembleRun {
  PartitionPtr partition;
  int m = 0;
  ModelSpec model;
  std::size_t n_paths = 0;
  uint64_t master_seed = 0;
  std::string config_hash;
  std::vector<double> grid;
  std::vector<uint64_t> seeds;

  // Row-major [path * grid.size() + j]; empty when not recorded.
  std::vector<double> x, z, bpoly, dhx;
  // Row-major [path * deta_r.size() + j].
  std::vector<double> deta_r;
  std::vector<double> deta;
  std::vector<double> x_at_deta;

  double x_at(std::size_t path, std::size_t j) const { return x[path * grid.size() + j]; }
  double z_at(std::size_t path, std::size_t j) const { return z[path * grid.size() + j]; }
};

/// Deterministic given the master seed: per-path seeds are derived by
/// hashing, so results do not depend on scheduling. Any non-finite state
/// aborts the whole run with the failing path index in the message.
EnsembleRun run_ensemble(PartitionPtr p, int m, const ModelSpec& spec, std::size_t n_paths,
                         uint64_t master_seed, const EnsembleOptions& opt);

/// Grid of `count` times from s to T, snapped to fine-grid nodes.
std::vector<double> make_output_grid(const Partition& p, int m, double s, std::size_t count);

std::string config_hash_string(const EnsembleRun& run);

void write_run_json(std::ostream& os, const EnsembleRun& run, const std::string& created_utc);
void write_trajectories_csv(std::ostream& os, const EnsembleRun& run);

}  // namespace wickwz
