#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "wickwz/errors.hpp"
#include "wickwz/numerics.hpp"
#include "wickwz/rng.hpp"
#include "wickwz/solver.hpp"

using namespace wickwz;

namespace {

PartitionPtr uniform4() { return make_uniform_partition(4, 1.0); }

bool throws_with(Errc code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

std::vector<double> default_grid() { return {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}; }

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("zero drift: Z is constant and X is the Gjessing closed form") {
  auto p = uniform4();
  const ModelSpec det{Drift::zero(), {}, InitialCondition::deterministic(1.3), 0.0};
  const Direction h = make_haar_direction(p);
  const ModelSpec logn{Drift::zero(), {}, InitialCondition::lognormal_exp(0.8, h), 0.0};

  for (uint64_t seed : {11u, 12u, 13u}) {
    const auto ps = PathSample::sample(p, 32, seed);
    const auto traj_det = solve_trajectory(ps, det, default_grid());
    const auto traj_log = solve_trajectory(ps, logn, default_grid());
    for (std::size_t j = 0; j < traj_det.grid.size(); ++j) {
      const double t = traj_det.grid[j];
      const auto kappa = KernelSlice::plain(p, 0.0, t);
      CHECK(traj_det.z_values[j] == 1.3);
      // X = x0 E(kappa)
      const double expected_det = 1.3 * stoch_exp(ps, kappa).value;
      CHECK(traj_det.x_values[j] == doctest::Approx(expected_det).epsilon(1e-12));
      // X = y0 E(h) E(kappa); <h, kappa> = 0 makes the product exact.
      const double expected_log = 0.8 * stoch_exp(ps, h).value * stoch_exp(ps, kappa).value;
      CHECK(traj_log.x_values[j] == doctest::Approx(expected_log).epsilon(1e-12));
    }
  }
}

TEST_CASE("X starts at Y and reconstruction at t = s is exact") {
  auto p = uniform4();
  const auto ps = PathSample::sample(p, 32, 5);
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::tanh_logistic(1.0, 1.0), {}, InitialCondition::lognormal_exp(2.0, h),
                       0.25};
  const double y = spec.init.value(ps);
  CHECK(reconstruct_x(ps, spec, 0.25) == doctest::Approx(y).epsilon(1e-15));
}

TEST_CASE("linear drift solves the exponential ODE") {
  auto p = uniform4();
  const double beta = 0.8, x0 = 1.4;
  const ModelSpec spec{Drift::linear(beta), {}, InitialCondition::deterministic(x0), 0.0};
  const auto ps = PathSample::sample(p, 32, 21);

  const auto traj = solve_trajectory(ps, spec, default_grid());
  for (std::size_t j = 0; j < traj.grid.size(); ++j) {
    const double t = traj.grid[j];
    const double z_exact = x0 * std::exp(beta * t);
    CHECK(std::fabs(traj.z_values[j] - z_exact) / z_exact <= 1e-6);
    const double x_exact = z_exact * stoch_exp(ps, KernelSlice::plain(p, 0.0, t)).value;
    CHECK(std::fabs(traj.x_values[j] - x_exact) / std::fabs(x_exact) <= 1e-6);
  }
}

TEST_CASE("halving the RK4 step cuts the linear-drift error about 16x") {
  auto p = uniform4();
  const double beta = 0.9, x0 = 1.0;
  const ModelSpec spec{Drift::linear(beta), {}, InitialCondition::deterministic(x0), 0.0};
  const auto ps = PathSample::sample(p, 4, 3);  // coarse grid keeps the error visible
  const double exact = x0 * std::exp(beta);

  const double e1 = std::fabs(solve_z_dense(ps, spec, 1.0, 1).z.back() - exact);
  const double e2 = std::fabs(solve_z_dense(ps, spec, 1.0, 2).z.back() - exact);
  const double ratio = e1 / e2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("order-4 self-convergence on the tanh drift") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  const ModelSpec spec{Drift::tanh_logistic(1.2, 0.9), {}, InitialCondition::lognormal_exp(1.0, h),
                       0.0};
  const auto ps = PathSample::sample(p, 4, 77);
  const double z1 = solve_z_dense(ps, spec, 1.0, 1).z.back();
  const double z2 = solve_z_dense(ps, spec, 1.0, 2).z.back();
  const double z4 = solve_z_dense(ps, spec, 1.0, 4).z.back();
  const double ratio = (z1 - z2) / (z2 - z4);
  CHECK(ratio >= 8.0);  // 16 within a factor of 2
  CHECK(ratio <= 32.0);
}

TEST_CASE("linear drift X matches e^{beta (t-s)} x0 E(kappa) for s > 0") {
  auto p = uniform4();
  const double beta = 0.5, x0 = 2.0, s = 0.25;
  const ModelSpec spec{Drift::linear(beta), {}, InitialCondition::deterministic(x0), s};
  const auto ps = PathSample::sample(p, 32, 9);
  for (double t : {0.375, 0.5, 0.8125, 1.0}) {
    const double expected =
        std::exp(beta * (t - s)) * x0 * stoch_exp(ps, KernelSlice::plain(p, s, t)).value;
    CHECK(std::fabs(reconstruct_x(ps, spec, t) - expected) / std::fabs(expected) <= 1e-6);
  }
}

TEST_CASE("Gjessing route: shifted functional times E(kappa) equals the solver") {
  auto p = uniform4();
  const Direction h = make_haar_direction(p);
  // F = exp(integral h dB) = y0 E(h) with y0 = exp(|h|^2/2).
  const double y0 = std::exp(0.5 * h.norm_sq());
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::lognormal_exp(y0, h), 0.0};
  const auto ps = PathSample::sample(p, 32, 123);
  for (double t : {0.25, 0.59375, 1.0}) {
    const auto kappa = KernelSlice::plain(p, 0.0, t);
    const double f_shifted = std::exp(wiener_integral(shift_path(ps, kappa, -1.0), h));
    const double via_gjessing = f_shifted * stoch_exp(ps, kappa).value;
    CHECK(reconstruct_x(ps, spec, t) == doctest::Approx(via_gjessing).epsilon(1e-12));
  }
}

TEST_CASE("sigma weights flow into the reduction") {
  auto p = uniform4();
  const std::vector<double> sigma = {0.5, 2.0, 1.0, 0.25};
  const ModelSpec spec{Drift::zero(), sigma, InitialCondition::deterministic(1.0), 0.0};
  const auto ps = PathSample::sample(p, 32, 14);
  for (double t : {0.375, 1.0}) {
    const double expected = stoch_exp(ps, weighted_kernel(p, 0.0, t, sigma)).value;
    CHECK(reconstruct_x(ps, spec, t) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("no spurious jumps appear under grid refinement") {
  auto p = uniform4();
  const ModelSpec spec{Drift::tanh_logistic(1.0, 1.0), {}, InitialCondition::deterministic(1.0),
                       0.0};
  const auto ps = PathSample::sample(p, 32, 31);
  const auto max_jump = [&](std::size_t count) {
    const auto traj = solve_trajectory(ps, spec, make_output_grid(*p, 32, 0.0, count));
    double worst = 0.0;
    for (std::size_t j = 1; j < traj.grid.size(); ++j)
      worst = std::max(worst, std::fabs(traj.x_values[j] - traj.x_values[j - 1]));
    return worst;
  };
  const double coarse = max_jump(9);
  const double fine = max_jump(65);
  CHECK(fine <= coarse);
}

TEST_CASE("grid validation") {
  auto p = uniform4();
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::deterministic(1.0), 0.0};
  const auto ps = PathSample::sample(p, 32, 2);
  CHECK(throws_with(Errc::grid_misaligned, [&] { solve_z(ps, spec, {0.1234567}); }));
  CHECK(throws_with(Errc::grid_misaligned, [&] { solve_z(ps, spec, {0.5, 0.25}); }));
  CHECK(throws_with(Errc::out_of_range, [&] { solve_z(ps, spec, {1.5}); }));
}

TEST_CASE("non-finite states abort with the path index") {
  auto p = uniform4();
  const ModelSpec spec{Drift::linear(1e4), {}, InitialCondition::deterministic(1.0), 0.0};
  EnsembleOptions opt;
  opt.grid = {1.0};
  try {
    run_ensemble(p, 32, spec, 3, 5, opt);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_finite_state);
    CHECK(std::string(e.what()).find("path 0") != std::string::npos);
  }
}

TEST_CASE("ensembles are reproducible and keep the unit mean") {
  auto p = uniform4();
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::deterministic(1.0), 0.0};
  EnsembleOptions opt;
  opt.grid = default_grid();

  const auto run1 = run_ensemble(p, 32, spec, 64, 99, opt);
  const auto run2 = run_ensemble(p, 32, spec, 64, 99, opt);
  CHECK(run1.x == run2.x);
  CHECK(run1.config_hash == run2.config_hash);
  CHECK(run1.seeds[5] == derive_seed(99, 5));

  // Results do not depend on the worker count.
  EnsembleOptions serial = opt;
  serial.threads = 1;
  EnsembleOptions wide = opt;
  wide.threads = 4;
  CHECK(run_ensemble(p, 32, spec, 64, 99, serial).x ==
        run_ensemble(p, 32, spec, 64, 99, wide).x);

  const auto big = run_ensemble(p, 32, spec, 20000, 7, opt);
  const std::size_t g = big.grid.size();
  std::vector<double> col(big.n_paths);
  for (std::size_t j = 0; j < g; ++j) {
    for (std::size_t i = 0; i < big.n_paths; ++i) col[i] = big.x[i * g + j];
    const double mean = pairwise_mean(col);
    const double se = standard_error(col);
    CHECK(std::fabs(mean - 1.0) <= 3.5 * se);
  }
}

TEST_CASE("run serialization has the documented shape") {
  auto p = uniform4();
  const ModelSpec spec{Drift::zero(), {}, InitialCondition::deterministic(1.0), 0.0};
  EnsembleOptions opt;
  opt.grid = {0.5, 1.0};
  const auto run = run_ensemble(p, 32, spec, 2, 123, opt);

  std::ostringstream csv;
  write_trajectories_csv(csv, run);
  const std::string text = csv.str();
  CHECK(text.rfind("path_id,t,Z,X\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);  // header + 2 paths x 2 times

  std::ostringstream js;
  write_run_json(js, run, "2020-01-01T00:00:00Z");
  CHECK(js.str().find("\"schema_version\": 1") != std::string::npos);
  CHECK(js.str().find(run.config_hash) != std::string::npos);
}

}  // TEST_SUITE
